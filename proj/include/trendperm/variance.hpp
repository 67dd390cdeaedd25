#pragma once

#include "trendperm/series.hpp"

#include <cstddef>
#include <span>

namespace trendperm {

inline constexpr double kDefaultVarianceFloor = 1e-3;

/// A studentizer. `value = max(raw_value, floor)`, `floored` iff raw_value < floor.
struct VarianceEstimate {
    double value = 0.0;
    double raw_value = 0.0;
    std::size_t bandwidth = 1;
    bool floored = false;
};

/// floor(n^{1/3}) clamped to [1, n-1].
[[nodiscard]] std::size_t bandwidth_default(std::size_t n);

/// Bandwidth actually used for a series of length n: zero is a DomainError,
/// anything >= n is clamped to n-1.
[[nodiscard]] std::size_t effective_bandwidth(std::size_t requested, std::size_t n);

/// Long-run variance estimate for sqrt(n) U_n:
///   4/9 + 8/(3n) sum_{k=1}^{b} sum_{j=1}^{n-k} (1 - 2F_n(X_j))(1 - 2F_n(X_{j+k}))
/// with F_n(X_j) = rank_j / n. The double sum is accumulated in integers.
[[nodiscard]] VarianceEstimate global_variance(const TimeSeries& series, std::size_t bandwidth,
                                               double floor = kDefaultVarianceFloor);

[[nodiscard]] VarianceEstimate global_variance_from_ranks(std::span<const Rank> ranks, std::size_t bandwidth,
                                                          double floor = kDefaultVarianceFloor);

/// tau_n^2 = sigma_n^2 / G where sigma_n^2 is the truncated autocovariance sum
/// of the local increments Y_i up to lag `bandwidth`.
[[nodiscard]] VarianceEstimate local_variance(const LocalIncrements& y, std::size_t bandwidth,
                                              double floor = kDefaultVarianceFloor);

[[nodiscard]] VarianceEstimate local_variance_from_increments(std::span<const std::int64_t> y, std::size_t window,
                                                              std::size_t bandwidth,
                                                              double floor = kDefaultVarianceFloor);

/// sqrt(n) u / sqrt(var.value)
[[nodiscard]] double studentize_global(double u, const VarianceEstimate& var, std::size_t n);

/// sqrt(n G) v / sqrt(var.value)
[[nodiscard]] double studentize_local(double v, const VarianceEstimate& var, std::size_t n, std::size_t window);

}  // namespace trendperm
