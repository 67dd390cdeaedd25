#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace trendperm {

using Rank = std::uint32_t;

// =============================================================================
// Tie policies
// =============================================================================

/// Duplicates are an error (the continuity assumption of every test here).
struct RejectTies {};

/// Duplicates are allowed; tied entries get a seeded, uniformly shuffled rank
/// order among themselves. Values are left untouched.
struct RandomTieBreak {
    std::uint64_t seed = 0;
};

using TiePolicy = std::variant<RejectTies, RandomTieBreak>;

// =============================================================================
// RankVector
// =============================================================================

/// 1-based ranks; always a bijection onto {1, ..., n}.
class RankVector {
public:
    /// Throws DomainError unless `ranks` is a permutation of 1..n.
    explicit RankVector(std::vector<Rank> ranks);

    static RankVector identity(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return ranks_.size(); }
    [[nodiscard]] Rank operator[](std::size_t i) const noexcept { return ranks_[i]; }
    [[nodiscard]] std::span<const Rank> view() const noexcept { return ranks_; }
    [[nodiscard]] const std::vector<Rank>& values() const noexcept { return ranks_; }

    friend bool operator==(const RankVector&, const RankVector&) = default;

private:
    std::vector<Rank> ranks_;
};

// =============================================================================
// TimeSeries
// =============================================================================

/// A validated sample path X_1..X_n: finite, n >= 2, and tie-free unless it
/// was built with RandomTieBreak. Ranks are computed once at construction.
class TimeSeries {
public:
    /// Throws DomainError on short input or non-finite values, TieError on
    /// duplicates under RejectTies.
    explicit TimeSeries(std::vector<double> values, TiePolicy policy = RejectTies{});

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const RankVector& ranks() const noexcept { return ranks_; }

    /// True when duplicates were present and broken by the seeded shuffle.
    [[nodiscard]] bool had_ties() const noexcept { return had_ties_; }

private:
    std::vector<double> values_;
    RankVector ranks_;
    bool had_ties_ = false;
};

/// Local sign counts Y_i = sum_{j=max(i-G,1)}^{i-1} sign(X_i - X_j).
struct LocalIncrements {
    std::vector<std::int64_t> y;
    std::size_t window = 1;

    [[nodiscard]] std::int64_t sum() const noexcept;
};

// =============================================================================
// Operations on series
// =============================================================================

TimeSeries validate_series(std::span<const double> raw, TiePolicy policy = RejectTies{});

[[nodiscard]] const RankVector& ranks(const TimeSeries& series) noexcept;

/// F_n(X_i) = rank_i / n.
[[nodiscard]] std::vector<double> ecdf_at_samples(const TimeSeries& series);

/// Global Mann-Kendall statistic U_n = S / C(n,2), S = sum_{i<j} sign(X_j - X_i).
[[nodiscard]] double global_mk(const TimeSeries& series);

/// S by the direct O(n^2) double loop over the raw values (test oracle).
[[nodiscard]] std::int64_t pair_sum_bruteforce(const TimeSeries& series);

/// Local Mann-Kendall statistic of order g:
/// V_n = (n g)^{-1} sum_{i=1}^{n-g} sum_{j=i+1}^{i+g} sign(X_j - X_i).
/// Throws DomainError unless 1 <= g <= n-1.
[[nodiscard]] double local_mk(const TimeSeries& series, std::size_t g);

/// Throws DomainError unless 1 <= window <= n-1.
[[nodiscard]] LocalIncrements local_increments(const TimeSeries& series, std::size_t window);

// =============================================================================
// Rank kernels
//
// These work directly on a rank permutation (no validation) and are what the
// permutation engine evaluates in its inner loop. `scratch` buffers are resized
// as needed and may be reused across calls.
// =============================================================================

[[nodiscard]] inline std::int64_t pair_count(std::size_t n) noexcept {
    return static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
}

/// Number of pairs i < j with ranks[i] > ranks[j], by merge sort.
[[nodiscard]] std::int64_t count_inversions(std::span<const Rank> ranks, std::vector<Rank>& scratch);

/// S = C(n,2) - 2 * inversions; exact.
[[nodiscard]] std::int64_t concordance_sum(std::span<const Rank> ranks, std::vector<Rank>& scratch);

/// Integer numerator of V_n: n*g*V_n.
[[nodiscard]] std::int64_t local_pair_sum(std::span<const Rank> ranks, std::size_t g);

/// Y_1..Y_n written into `out`.
void local_increments_into(std::span<const Rank> ranks, std::size_t window,
                           std::vector<std::int64_t>& out);

}  // namespace trendperm
