#include "trendperm/errors.hpp"
#include "trendperm/null_table.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/trend_tests.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace trendperm;

namespace {

TimeSeries increasing(std::size_t n) {
    std::vector<double> x(n);
    std::iota(x.begin(), x.end(), 1.0);
    return TimeSeries(x);
}

TimeSeries decreasing(std::size_t n) {
    std::vector<double> x(n);
    std::iota(x.rbegin(), x.rend(), 1.0);
    return TimeSeries(x);
}

}  // namespace

TEST(Methods, ParseAndPrint) {
    EXPECT_EQ(parse_method("global-stud"), Method::GlobalStudentized);
    EXPECT_EQ(parse_method("global_unstud"), Method::GlobalUnstudentized);
    EXPECT_EQ(parse_method("classical"), Method::Classical);
    EXPECT_EQ(parse_method("local_stud"), Method::LocalStudentized);
    EXPECT_EQ(to_string(Method::LocalUnstudentized), "local-unstud");
    EXPECT_THROW((void)parse_method("bogus"), DomainError);
}

TEST(GlobalStudentized, IncreasingSeriesHitsMinimalPAtLargeN) {
    TestOptions o;
    o.permutations = 999;
    o.seed = 3;
    const auto r = global_studentized_test(increasing(1000), o);
    EXPECT_TRUE(r.reject);
    EXPECT_DOUBLE_EQ(r.p_value.p, 1.0 / 1000.0);
    ASSERT_TRUE(r.studentizer.has_value());
    EXPECT_EQ(r.studentizer->bandwidth, 10u);
    EXPECT_EQ(r.method, "global-stud");
}

TEST(GlobalStudentized, SmallVarianceEstimatesCanBeatIncreasingSeries) {
    // at n = 50 the identity has sigma^2 near 2.8 while some permutations land
    // on the floor, so roughly half a percent of them exceed it
    TestOptions o;
    o.permutations = 999;
    o.seed = 3;
    const auto r = global_studentized_test(increasing(50), o);
    EXPECT_TRUE(r.reject);
    EXPECT_GT(r.p_value.p, 1.0 / 1000.0);
    EXPECT_LT(r.p_value.p, 0.02);
    EXPECT_EQ(r.studentizer->bandwidth, 3u);
}

TEST(GlobalUnstudentized, IncreasingSeriesHitsMinimalP) {
    TestOptions o;
    o.permutations = 999;
    o.seed = 3;
    const auto r = global_unstudentized_test(increasing(50), o);
    EXPECT_DOUBLE_EQ(r.p_value.p, 1.0 / 1000.0);
}

TEST(GlobalStudentized, NeedsThreePoints) {
    EXPECT_THROW((void)global_studentized_test(TimeSeries({1, 2})), DomainError);
}

TEST(GlobalUnstudentized, DecreasingSeriesNeverRejects) {
    TestOptions o;
    o.seed = 1;
    const auto r = global_unstudentized_test(decreasing(40), o);
    EXPECT_FALSE(r.reject);
    EXPECT_EQ(r.p_value.p, 1.0);
    EXPECT_FALSE(r.studentizer.has_value());
}

TEST(GlobalUnstudentized, ExactNullLevelAtSix) {
    TestOptions o;
    o.null_mode = NullMode::Exact;
    const auto key = make_null_key({StatisticKind::GlobalUnstudentized}, 6, 0, 0);
    const double level = attainable_level(*tabulate_null(key), 0.05);
    int rejects = 0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        rejects += global_unstudentized_test(gen_iid(6, Innovation::gaussian(), 200 + r), o).reject ? 1 : 0;
    }
    EXPECT_LE(level, 0.05);
    EXPECT_NEAR(rejects / double(reps), level, 0.01);
}

TEST(Classical, StatisticIsU) {
    const auto r = classical_mk_test(TimeSeries({2, 1, 3}));
    EXPECT_DOUBLE_EQ(r.statistic, 1.0 / 3.0);
    EXPECT_FALSE(r.permutations.has_value());
}

TEST(Classical, NormalApproximation) {
    const auto s = gen_iid(100, Innovation::gaussian(), 4);
    const auto r = classical_mk_test(s);
    const double n = 100.0;
    const double z = r.statistic / std::sqrt(2.0 * (2 * n + 5) / (9 * n * (n - 1)));
    EXPECT_NEAR(r.p_value.p, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-12);
    TestOptions less;
    less.side = Side::Less;
    EXPECT_NEAR(classical_mk_test(s, less).p_value.p, 1.0 - r.p_value.p, 1e-12);
}

TEST(Classical, ExactNullForSmallN) {
    // n = 5 increasing: S = 10 is the unique maximum among 120 arrangements
    const auto r = classical_mk_test(increasing(5));
    EXPECT_NEAR(r.p_value.p, 1.0 / 120.0, 1e-15);
    EXPECT_TRUE(r.reject);
}

TEST(LocalStudentized, IncreasingSeriesHitsMinimalP) {
    TestOptions o;
    o.permutations = 999;
    const auto r = local_studentized_test(increasing(60), 5, o);
    EXPECT_TRUE(r.reject);
    EXPECT_DOUBLE_EQ(r.p_value.p, 1.0 / 1000.0);
    ASSERT_TRUE(r.order.has_value());
    EXPECT_EQ(*r.order, 5u);
    EXPECT_TRUE(r.studentizer.has_value());
}

TEST(LocalTests, OrderOutOfRange) {
    EXPECT_THROW((void)local_studentized_test(increasing(5), 5), DomainError);
    EXPECT_THROW((void)local_unstudentized_test(increasing(5), 0), DomainError);
}

TEST(Invariance, MonotoneTransformGivesSameReport) {
    const auto s = gen_ar1(80, 0.3, 6);
    std::vector<double> t(s.size());
    std::transform(s.values().begin(), s.values().end(), t.begin(), [](double v) { return std::atan(v) * 7 - 2; });
    const TimeSeries st(t);
    TestOptions o;
    o.permutations = 300;
    o.seed = 19;
    for (Method m : {Method::GlobalStudentized, Method::GlobalUnstudentized, Method::Classical,
                     Method::LocalStudentized, Method::LocalUnstudentized}) {
        const auto a = run_test(m, s, o, 4);
        const auto b = run_test(m, st, o, 4);
        EXPECT_EQ(a.statistic, b.statistic);
        EXPECT_EQ(a.p_value.p, b.p_value.p);
        EXPECT_EQ(a.reject, b.reject);
    }
}

TEST(Reversal, ExactPValuesAddToOnePlusAtom) {
    TestOptions o;
    o.null_mode = NullMode::Exact;
    const std::vector<std::pair<Method, StatisticKind>> cases{
        {Method::GlobalStudentized, StatisticKind::GlobalStudentized},
        {Method::GlobalUnstudentized, StatisticKind::GlobalUnstudentized},
        {Method::LocalUnstudentized, StatisticKind::LocalUnstudentized},
    };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = gen_iid(7, Innovation::gaussian(), seed);
        std::vector<double> rev(s.values().rbegin(), s.values().rend());
        const TimeSeries sr(rev);
        for (const auto& [m, kind] : cases) {
            // order 1: no boundary pairs, so reversal negates V_n exactly
            const auto a = run_test(m, s, o, 1);
            const auto b = run_test(m, sr, o, 1);
            EXPECT_DOUBLE_EQ(b.statistic, -a.statistic);
            const auto null = tabulate_null(make_null_key({kind, 1}, 7, 0, 0));
            const double atom = static_cast<double>(null->count_at_least(a.statistic) -
                                                    null->count_at_least(std::nextafter(a.statistic, 1e300))) /
                                static_cast<double>(null->size());
            EXPECT_NEAR(a.p_value.p + b.p_value.p, 1.0 + atom, 1e-12) << to_string(m);
        }
    }
}

TEST(Tabulated, MatchesExactAtSmallN) {
    const auto s = gen_iid(6, Innovation::gaussian(), 77);
    TestOptions exact;
    exact.null_mode = NullMode::Exact;
    TestOptions tab;
    tab.null_mode = NullMode::Tabulated;
    tab.permutations = 0;
    EXPECT_EQ(global_studentized_test(s, exact).p_value.p, global_studentized_test(s, tab).p_value.p);
}

TEST(Tabulated, SampledTableIsSharedAcrossSeries) {
    TestOptions tab;
    tab.null_mode = NullMode::Tabulated;
    tab.permutations = 400;
    tab.seed = 5;
    const auto before = NullTableCache::global().size();
    (void)local_studentized_test(gen_iid(90, Innovation::gaussian(), 1), 5, tab);
    (void)local_studentized_test(gen_iid(90, Innovation::gaussian(), 2), 5, tab);
    EXPECT_EQ(NullTableCache::global().size(), before + 1);
}

TEST(Report, KeyValueAndJson) {
    TestOptions o;
    o.permutations = 200;
    o.seed = 42;
    const auto r = global_studentized_test(gen_iid(30, Innovation::gaussian(), 3), o);
    const auto text = format_report(r);
    EXPECT_NE(text.find("method=global-stud\n"), std::string::npos);
    EXPECT_NE(text.find("statistic="), std::string::npos);
    EXPECT_NE(text.find("p_value="), std::string::npos);
    EXPECT_NE(text.find("reject="), std::string::npos);
    const auto j = nlohmann::json::parse(report_to_json(r));
    EXPECT_EQ(j["method"], "global-stud");
    EXPECT_EQ(j["seed"], 42);
    EXPECT_DOUBLE_EQ(j["p_value"].get<double>(), r.p_value.p);
}
