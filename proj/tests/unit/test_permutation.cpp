#include "trendperm/errors.hpp"
#include "trendperm/permutation.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/rng.hpp"
#include "trendperm/statistic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

using namespace trendperm;

namespace {

std::size_t perm_index(const std::vector<Rank>& p) {
    // Lehmer code
    std::size_t idx = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::size_t smaller = 0;
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            smaller += p[j] < p[i] ? 1 : 0;
        }
        idx = idx * (p.size() - i) + smaller;
    }
    return idx;
}

PermutationDistribution sampled_dist(std::vector<double> values) {
    PermutationDistribution d;
    std::sort(values.begin(), values.end());
    d.values = std::move(values);
    d.mode = SampledMode{d.values.size(), 0};
    d.n = 10;
    return d;
}

}  // namespace

TEST(Rng, DeriveSeedIsDeterministicAndKeySensitive) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
    EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {0, 0}));
}

TEST(Rng, BoundedStaysInRange) {
    Stream s(5);
    for (int i = 0; i < 10000; ++i) {
        EXPECT_LT(s.bounded(7), 7u);
    }
    EXPECT_EQ(s.bounded(1), 0u);
}

TEST(SamplePermutation, SizeOneIsIdentity) {
    Stream s(1);
    EXPECT_EQ(sample_permutation(s, 1), (std::vector<Rank>{1}));
}

TEST(SamplePermutation, UniformOnTwo) {
    Stream s(2);
    int first = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        first += sample_permutation(s, 2)[0] == 1 ? 1 : 0;
    }
    EXPECT_NEAR(first / double(draws), 0.5, 0.01);
}

TEST(SamplePermutation, UniformOnFour) {
    Stream s(4);
    std::vector<int> counts(24, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        ++counts[perm_index(sample_permutation(s, 4))];
    }
    double chi2 = 0.0;
    const double expected = draws / 24.0;
    for (int c : counts) {
        EXPECT_GT(c, 0);
        EXPECT_LT(std::abs(c / double(draws) - 1.0 / 24.0), 0.005);
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 23 degrees of freedom; 0.999 quantile is 49.7
    EXPECT_LT(chi2, 49.7);
}

TEST(SamplePermutation, DeterministicGivenStream) {
    Stream a(77);
    Stream b(77);
    EXPECT_EQ(sample_permutation(a, 50), sample_permutation(b, 50));
}

TEST(ExactDistribution, GlobalNThree) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 3);
    const auto d = exact_permutation_distribution(3, u);
    ASSERT_EQ(d.size(), 6u);
    const double r3 = std::sqrt(3.0);
    const std::vector<double> expected{-r3, -r3 / 3, -r3 / 3, r3 / 3, r3 / 3, r3};
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_NEAR(d.values[i], expected[i], 1e-15);
    }
    EXPECT_TRUE(d.is_exact());
}

TEST(ExactDistribution, GlobalNFourVariance) {
    const RankStatisticFn u = [scratch = std::vector<Rank>{}](std::span<const Rank> r) mutable {
        return static_cast<double>(concordance_sum(r, scratch)) / static_cast<double>(pair_count(r.size()));
    };
    const auto d = exact_permutation_distribution(4, u, "U");
    EXPECT_EQ(d.size(), 24u);
    EXPECT_NEAR(d.mean(), 0.0, 1e-15);
    EXPECT_NEAR(d.variance(), 13.0 / 54.0, 1e-12);
    EXPECT_NEAR(d.variance(), 2.0 * (2 * 4 + 5) / (9.0 * 4 * 3), 1e-12);
}

TEST(ExactDistribution, LimitError) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 9);
    EXPECT_THROW((void)exact_permutation_distribution(9, u), LimitError);
}

TEST(ExactDistribution, DistributionFreeAcrossSeries) {
    const RankStatistic t({StatisticKind::GlobalStudentized}, 4);
    const TimeSeries a({1, 2, 3, 4});
    const TimeSeries b({10, 40, 20, 30});
    // exact enumeration visits every arrangement, so the source ranks do not matter;
    // check by enumerating from each series' own ranks
    auto enumerate_from = [&](const TimeSeries& s) {
        std::vector<Rank> r = s.ranks().values();
        std::sort(r.begin(), r.end());
        std::vector<double> v;
        do {
            v.push_back(t(r));
        } while (std::next_permutation(r.begin(), r.end()));
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_EQ(enumerate_from(a), enumerate_from(b));
    EXPECT_EQ(enumerate_from(a), exact_permutation_distribution(4, t).values);
}

TEST(SampledDistribution, NThreeMasses) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 3);
    const auto d = permutation_distribution(TimeSeries({0.3, -1.0, 2.0}), u, 6000, 11);
    ASSERT_EQ(d.size(), 6000u);
    std::map<long, int> freq;
    for (double v : d.values) {
        ++freq[std::lround(v / std::sqrt(3.0) * 3.0)];
    }
    ASSERT_EQ(freq.size(), 4u);
    EXPECT_NEAR(freq[-3] / 6000.0, 1.0 / 6.0, 0.02);
    EXPECT_NEAR(freq[-1] / 6000.0, 1.0 / 3.0, 0.02);
    EXPECT_NEAR(freq[1] / 6000.0, 1.0 / 3.0, 0.02);
    EXPECT_NEAR(freq[3] / 6000.0, 1.0 / 6.0, 0.02);
}

TEST(SampledDistribution, SingleDraw) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 5);
    const auto d = permutation_distribution(TimeSeries({1, 2, 3, 4, 5}), u, 1, 3);
    EXPECT_EQ(d.size(), 1u);
    EXPECT_FALSE(d.is_exact());
}

TEST(SampledDistribution, ReproducibleAndOrderFree) {
    const auto s = gen_iid(40, Innovation::gaussian(), 8);
    const RankStatistic t({StatisticKind::LocalStudentized, 3}, 40);
    const auto a = permutation_distribution(s, t, 500, 12);
    const auto b = permutation_distribution(s, t, 500, 12);
    EXPECT_EQ(a.values, b.values);
    const auto c = permutation_distribution(s, t, 500, 13);
    EXPECT_NE(a.values, c.values);
    // the first 200 draws of a larger run are the same draws
    const auto small = permutation_distribution(s, t, 200, 12);
    std::size_t contained = 0;
    for (double v : small.values) {
        contained += std::binary_search(a.values.begin(), a.values.end(), v) ? 1 : 0;
    }
    EXPECT_EQ(contained, small.size());
}

TEST(SampledDistribution, AgreesWithExactForSmallN) {
    for (std::size_t n = 3; n <= 7; ++n) {
        for (auto kind : {StatisticKind::GlobalStudentized, StatisticKind::LocalUnstudentized}) {
            const RankStatistic t({kind, 2}, n);
            const auto exact = exact_permutation_distribution(n, t);
            const auto sampled = permutation_distribution(RankVector::identity(n).view(),
                                                          [&](std::span<const Rank> r) { return t(r); }, "t",
                                                          100000, 21 + n);
            // Kolmogorov-Smirnov distance over the support
            double ks = 0.0;
            for (double x : exact.values) {
                const double fe = static_cast<double>(exact.count_at_most(x)) / exact.size();
                const double fs = static_cast<double>(sampled.count_at_most(x)) / sampled.size();
                ks = std::max(ks, std::abs(fe - fs));
            }
            EXPECT_LT(ks, 0.01) << "n=" << n;
        }
    }
}

TEST(PValue, Boundaries) {
    std::vector<double> v(999);
    std::iota(v.begin(), v.end(), 0.0);
    const auto d = sampled_dist(v);
    EXPECT_DOUBLE_EQ(p_value(d, 5000.0, Side::Greater).p, 1.0 / 1000.0);
    EXPECT_EQ(p_value(d, -std::numeric_limits<double>::max(), Side::Greater).p, 1.0);
    EXPECT_EQ(p_value(d, -std::numeric_limits<double>::max(), Side::Less).p, 1.0 / 1000.0);
    EXPECT_EQ(p_value(d, 5000.0, Side::Greater).permutations, 999u);
}

TEST(PValue, TwoSidedAtMedianOfSymmetricNull) {
    std::vector<double> v;
    for (int i = -500; i <= 500; ++i) {
        v.push_back(i);
    }
    const auto d = sampled_dist(v);
    EXPECT_NEAR(p_value(d, 0.0, Side::TwoSided).p, 1.0, 1e-12);
    EXPECT_NEAR(p_value(d, 400.0, Side::TwoSided).p, 2.0 * 102.0 / 1002.0, 1e-12);
}

TEST(PValue, ExactModeCountsMass) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 4);
    const auto d = exact_permutation_distribution(4, u);
    const double top = d.values.back();
    EXPECT_DOUBLE_EQ(p_value(d, top, Side::Greater).p, 1.0 / 24.0);
    EXPECT_DOUBLE_EQ(p_value(d, d.values.front(), Side::Greater).p, 1.0);
    EXPECT_FALSE(p_value(d, top, Side::Greater).permutations.has_value());
}

TEST(Distribution, QuantileMonotone) {
    const RankStatistic t({StatisticKind::GlobalStudentized}, 6);
    const auto d = exact_permutation_distribution(6, t);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double q = d.quantile(i / 100.0);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(AttainableLevel, GlobalSixIsTwentyOverSevenTwenty) {
    const RankStatistic u({StatisticKind::GlobalUnstudentized}, 6);
    const auto d = exact_permutation_distribution(6, u);
    // S in {15, 13, 11} carries 1 + 5 + 14 arrangements
    EXPECT_NEAR(attainable_level(d, 0.05), 20.0 / 720.0, 1e-15);
}

TEST(AttainableLevel, ExactTestRejectionRateMatches) {
    // i.i.d. data against the exact null: the rejection rate equals the attainable level
    for (auto kind : {StatisticKind::GlobalStudentized, StatisticKind::LocalStudentized}) {
        const RankStatistic t({kind, 2}, 6);
        const auto d = exact_permutation_distribution(6, t);
        const double level = attainable_level(d, 0.05);
        int rejects = 0;
        const int reps = 20000;
        for (int r = 0; r < reps; ++r) {
            const auto s = gen_iid(6, Innovation::gaussian(), 50000 + r);
            rejects += p_value(d, t(s.ranks().view()), Side::Greater).p <= 0.05 ? 1 : 0;
        }
        EXPECT_NEAR(rejects / double(reps), level, 0.01);
        EXPECT_LE(level, 0.05);
    }
}
