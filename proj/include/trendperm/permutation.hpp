#pragma once

#include "trendperm/rng.hpp"
#include "trendperm/series.hpp"
#include "trendperm/statistic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trendperm {

inline constexpr std::size_t kDefaultEnumerationLimit = 8;

enum class Side { Greater, Less, TwoSided };

[[nodiscard]] std::string_view to_string(Side side) noexcept;
[[nodiscard]] Side parse_side(std::string_view id);

struct SampledMode {
    std::size_t permutations = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const SampledMode&, const SampledMode&) = default;
};

struct ExactMode {
    friend bool operator==(const ExactMode&, const ExactMode&) = default;
};

/// Values of a statistic under reorderings of a series. Values are kept
/// sorted ascending, which makes quantiles and tail counts cheap.
struct PermutationDistribution {
    std::vector<double> values;
    std::variant<SampledMode, ExactMode> mode;
    std::string statistic_kind;
    std::size_t n = 0;
    std::optional<std::size_t> bandwidth;

    [[nodiscard]] bool is_exact() const noexcept { return std::holds_alternative<ExactMode>(mode); }
    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

    /// Lower empirical quantile: smallest value v with F(v) >= q, q in [0, 1].
    [[nodiscard]] double quantile(double q) const;
    [[nodiscard]] double mean() const;
    /// Population variance (divide by the number of values).
    [[nodiscard]] double variance() const;
    [[nodiscard]] std::size_t count_at_least(double x) const;
    [[nodiscard]] std::size_t count_at_most(double x) const;
};

struct PValue {
    double p = 1.0;
    Side side = Side::Greater;
    std::optional<std::size_t> permutations;  ///< B for sampled nulls
};

using RankStatisticFn = std::function<double(std::span<const Rank>)>;

/// Uniform random permutation of {1..n}, Fisher-Yates driven by `stream`.
[[nodiscard]] std::vector<Rank> sample_permutation(Stream& stream, std::size_t n);

/// In-place Fisher-Yates shuffle.
void shuffle_ranks(std::span<Rank> ranks, Stream& stream);

/// Statistic evaluated on B independently permuted copies of the series'
/// ranks. Permutation b uses the stream keyed (seed, b), so the result does
/// not depend on evaluation order.
[[nodiscard]] PermutationDistribution permutation_distribution(const TimeSeries& series,
                                                               const RankStatistic& statistic,
                                                               std::size_t permutations, std::uint64_t seed);

[[nodiscard]] PermutationDistribution permutation_distribution(std::span<const Rank> ranks,
                                                               const RankStatisticFn& statistic,
                                                               std::string statistic_kind,
                                                               std::size_t permutations, std::uint64_t seed,
                                                               std::optional<std::size_t> bandwidth = std::nullopt);

/// Statistic over all n! permutations of (1..n). Throws LimitError above `limit`.
[[nodiscard]] PermutationDistribution exact_permutation_distribution(std::size_t n, const RankStatistic& statistic,
                                                                     std::size_t limit = kDefaultEnumerationLimit);

[[nodiscard]] PermutationDistribution exact_permutation_distribution(std::size_t n, const RankStatisticFn& statistic,
                                                                     std::string statistic_kind,
                                                                     std::optional<std::size_t> bandwidth = std::nullopt,
                                                                     std::size_t limit = kDefaultEnumerationLimit);

/// Sampled: greater p = (1 + #{v >= obs}) / (B + 1), less mirrored;
/// exact: #{v >= obs} / n!. Two-sided doubles the smaller one-sided p, capped at 1.
[[nodiscard]] PValue p_value(const PermutationDistribution& dist, double observed, Side side);

/// Exact rejection probability of the level-alpha test against this null when
/// the data are exchangeable: the mass of {v : p(v) <= alpha}. For side
/// greater this is the largest upper-tail mass P(V >= v) that is <= alpha.
[[nodiscard]] double attainable_level(const PermutationDistribution& exact_dist, double alpha, Side side = Side::Greater);

}  // namespace trendperm
