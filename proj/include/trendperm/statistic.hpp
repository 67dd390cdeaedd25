#pragma once

#include "trendperm/series.hpp"
#include "trendperm/variance.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trendperm {

/// The four rank statistics a permutation null can be built for.
enum class StatisticKind {
    GlobalUnstudentized,  ///< sqrt(n) U_n
    GlobalStudentized,    ///< sqrt(n) U_n / sigma_n
    LocalUnstudentized,   ///< sqrt(n g) V_n
    LocalStudentized,     ///< sqrt(n g) V_n / tau_n
};

[[nodiscard]] std::string_view to_string(StatisticKind kind) noexcept;
/// Throws DomainError on an unknown identifier.
[[nodiscard]] StatisticKind parse_statistic_kind(std::string_view id);

[[nodiscard]] constexpr bool is_local(StatisticKind k) noexcept {
    return k == StatisticKind::LocalUnstudentized || k == StatisticKind::LocalStudentized;
}
[[nodiscard]] constexpr bool is_studentized(StatisticKind k) noexcept {
    return k == StatisticKind::GlobalStudentized || k == StatisticKind::LocalStudentized;
}

struct StatisticParams {
    StatisticKind kind = StatisticKind::GlobalStudentized;
    std::size_t order = 1;                    ///< local order g (ignored for global kinds)
    std::optional<std::size_t> bandwidth;     ///< studentizer lag; floor(n^{1/3}) when empty
    double floor = kDefaultVarianceFloor;     ///< studentizer floor
};

/// A rank statistic bound to a series length. Evaluation takes a rank
/// permutation and is integer-exact up to the final division, so equal ranks
/// always give bit-identical values. Instances hold scratch space: use one
/// per thread.
class RankStatistic {
public:
    RankStatistic(StatisticParams params, std::size_t n);

    [[nodiscard]] double operator()(std::span<const Rank> ranks) const;

    /// Evaluates and also returns the studentizer (studentized kinds only).
    [[nodiscard]] double evaluate(std::span<const Rank> ranks, std::optional<VarianceEstimate>& studentizer) const;

    [[nodiscard]] const StatisticParams& params() const noexcept { return params_; }
    [[nodiscard]] StatisticKind kind() const noexcept { return params_.kind; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    /// Effective bandwidth for studentized kinds, empty otherwise.
    [[nodiscard]] std::optional<std::size_t> bandwidth() const noexcept;

private:
    StatisticParams params_;
    std::size_t n_;
    std::size_t bandwidth_ = 1;
    mutable std::vector<Rank> merge_scratch_;
    mutable std::vector<std::int64_t> increments_;
};

}  // namespace trendperm
