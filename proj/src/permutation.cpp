#include "trendperm/permutation.hpp"

#include "trendperm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trendperm {

std::string_view to_string(Side side) noexcept {
    switch (side) {
        case Side::Greater: return "greater";
        case Side::Less: return "less";
        case Side::TwoSided: return "two-sided";
    }
    return "unknown";
}

Side parse_side(std::string_view id) {
    if (id == "greater") return Side::Greater;
    if (id == "less") return Side::Less;
    if (id == "two-sided" || id == "two_sided") return Side::TwoSided;
    throw DomainError("unknown side '" + std::string(id) + "'");
}

// -----------------------------------------------------------------------------
// PermutationDistribution
// -----------------------------------------------------------------------------

double PermutationDistribution::quantile(double q) const {
    if (values.empty()) {
        throw DomainError("quantile of an empty distribution");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("quantile level must lie in [0, 1]");
    }
    const auto m = static_cast<double>(values.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * m));
    idx = idx == 0 ? 0 : idx - 1;
    return values[std::min(idx, values.size() - 1)];
}

double PermutationDistribution::mean() const {
    if (values.empty()) {
        throw DomainError("mean of an empty distribution");
    }
    // long double keeps the symmetric exact nulls at an exact zero mean
    long double s = 0.0L;
    for (double v : values) {
        s += v;
    }
    return static_cast<double>(s / static_cast<long double>(values.size()));
}

double PermutationDistribution::variance() const {
    const long double mu = mean();
    long double s = 0.0L;
    for (double v : values) {
        s += (v - mu) * (v - mu);
    }
    return static_cast<double>(s / static_cast<long double>(values.size()));
}

std::size_t PermutationDistribution::count_at_least(double x) const {
    return static_cast<std::size_t>(values.end() - std::lower_bound(values.begin(), values.end(), x));
}

std::size_t PermutationDistribution::count_at_most(double x) const {
    return static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), x) - values.begin());
}

// -----------------------------------------------------------------------------
// Sampling
// -----------------------------------------------------------------------------

void shuffle_ranks(std::span<Rank> ranks, Stream& stream) {
    for (std::size_t k = ranks.size(); k > 1; --k) {
        const auto j = static_cast<std::size_t>(stream.bounded(k));
        std::swap(ranks[k - 1], ranks[j]);
    }
}

std::vector<Rank> sample_permutation(Stream& stream, std::size_t n) {
    if (n < 1) {
        throw DomainError("sample_permutation needs n >= 1");
    }
    std::vector<Rank> p(n);
    std::iota(p.begin(), p.end(), Rank{1});
    shuffle_ranks(p, stream);
    return p;
}

PermutationDistribution permutation_distribution(std::span<const Rank> ranks, const RankStatisticFn& statistic,
                                                 std::string statistic_kind, std::size_t permutations,
                                                 std::uint64_t seed, std::optional<std::size_t> bandwidth) {
    if (permutations < 1) {
        throw DomainError("permutation count must be at least 1");
    }
    PermutationDistribution dist;
    dist.mode = SampledMode{permutations, seed};
    dist.statistic_kind = std::move(statistic_kind);
    dist.n = ranks.size();
    dist.bandwidth = bandwidth;
    dist.values.reserve(permutations);

    std::vector<Rank> work(ranks.size());
    for (std::size_t b = 0; b < permutations; ++b) {
        std::copy(ranks.begin(), ranks.end(), work.begin());
        Stream stream = Stream::keyed(seed, {b});
        shuffle_ranks(work, stream);
        dist.values.push_back(statistic(work));
    }
    std::sort(dist.values.begin(), dist.values.end());
    return dist;
}

PermutationDistribution permutation_distribution(const TimeSeries& series, const RankStatistic& statistic,
                                                 std::size_t permutations, std::uint64_t seed) {
    if (statistic.n() != series.size()) {
        throw DomainError("statistic was built for a different series length");
    }
    return permutation_distribution(
        series.ranks().view(), [&](std::span<const Rank> r) { return statistic(r); },
        std::string(to_string(statistic.kind())), permutations, seed, statistic.bandwidth());
}

// -----------------------------------------------------------------------------
// Enumeration
// -----------------------------------------------------------------------------

PermutationDistribution exact_permutation_distribution(std::size_t n, const RankStatisticFn& statistic,
                                                       std::string statistic_kind,
                                                       std::optional<std::size_t> bandwidth, std::size_t limit) {
    if (n < 2) {
        throw DomainError("exact enumeration needs n >= 2");
    }
    if (n > limit) {
        throw LimitError("exact enumeration of " + std::to_string(n) + "! permutations exceeds the limit n <= " +
                         std::to_string(limit));
    }
    PermutationDistribution dist;
    dist.mode = ExactMode{};
    dist.statistic_kind = std::move(statistic_kind);
    dist.n = n;
    dist.bandwidth = bandwidth;

    std::vector<Rank> perm(n);
    std::iota(perm.begin(), perm.end(), Rank{1});
    do {
        dist.values.push_back(statistic(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(dist.values.begin(), dist.values.end());
    return dist;
}

PermutationDistribution exact_permutation_distribution(std::size_t n, const RankStatistic& statistic,
                                                       std::size_t limit) {
    if (statistic.n() != n) {
        throw DomainError("statistic was built for a different series length");
    }
    return exact_permutation_distribution(
        n, [&](std::span<const Rank> r) { return statistic(r); }, std::string(to_string(statistic.kind())),
        statistic.bandwidth(), limit);
}

// -----------------------------------------------------------------------------
// p-values
// -----------------------------------------------------------------------------

PValue p_value(const PermutationDistribution& dist, double observed, Side side) {
    if (dist.values.empty()) {
        throw DomainError("p-value against an empty distribution");
    }
    const auto m = static_cast<double>(dist.size());
    const bool exact = dist.is_exact();
    auto one_sided = [&](std::size_t count) {
        return exact ? static_cast<double>(count) / m : (1.0 + static_cast<double>(count)) / (m + 1.0);
    };
    const double greater = one_sided(dist.count_at_least(observed));
    const double less = one_sided(dist.count_at_most(observed));

    PValue out;
    out.side = side;
    if (!exact) {
        out.permutations = dist.size();
    }
    switch (side) {
        case Side::Greater: out.p = greater; break;
        case Side::Less: out.p = less; break;
        case Side::TwoSided: out.p = std::min(1.0, 2.0 * std::min(greater, less)); break;
    }
    return out;
}

double attainable_level(const PermutationDistribution& exact_dist, double alpha, Side side) {
    if (!exact_dist.is_exact()) {
        throw DomainError("attainable level needs an exact distribution");
    }
    // the rejection region is {p <= alpha}; p only takes the distinct tail
    // masses, so sum the masses of the values whose p-value is <= alpha
    const auto& v = exact_dist.values;
    double level = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) {
            ++j;
        }
        if (p_value(exact_dist, v[i], side).p <= alpha) {
            level += static_cast<double>(j - i) / static_cast<double>(v.size());
        }
        i = j;
    }
    return level;
}

}  // namespace trendperm
