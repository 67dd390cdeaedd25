#include "trendperm/errors.hpp"
#include "trendperm/experiment.hpp"
#include "trendperm/power_study.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

using namespace trendperm;

namespace {

ExperimentConfig parse(const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
}

std::string csv_without_wall_time(const ResultTable& t) {
    ResultTable copy = t;
    for (auto& r : copy.rows) r.wall_time_s = 0.0;
    std::ostringstream out;
    write_csv(out, copy);
    return out.str();
}

const char* kSmallConfig = R"(
# two processes, a sweep and two methods
process = ar1
rho = -0.5, 0.5
process = mdep
m = 0, 2
n = 30, 60
methods = global_stud, classical, local_unstud
M = 3
n_sims = 12
n_perms = 49
seed = 2024
)";

}  // namespace

TEST(Config, SweepList) {
    const auto c = parse("process = iid\nn = 10, 50, 100\nmethods = global-stud\n");
    EXPECT_EQ(c.n, (std::vector<std::size_t>{10, 50, 100}));
    EXPECT_EQ(c.processes.size(), 1u);
    EXPECT_EQ(c.alpha, (std::vector<double>{0.05}));
}

TEST(Config, RepeatedKeysAppend) {
    const auto c = parse("process = ar1\nrho = 0.2\nrho = 0.6\nn = 10\nn = 20, 30\nmethods = classical\n");
    EXPECT_EQ(c.n, (std::vector<std::size_t>{10, 20, 30}));
    ASSERT_EQ(c.processes[0].params.size(), 1u);
    EXPECT_EQ(c.processes[0].params[0].second, (std::vector<std::string>{"0.2", "0.6"}));
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
    try {
        (void)parse("process = iid\nn = 10\nflavour = mint\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("flavour"), std::string::npos);
    }
}

TEST(Config, OtherErrors) {
    EXPECT_THROW((void)parse("rho = 0.5\n"), ParseError);
    EXPECT_THROW((void)parse("process = iid\nrho = 0.5\n"), ParseError);
    EXPECT_THROW((void)parse("process = nope\n"), ParseError);
    EXPECT_THROW((void)parse("n = ten\n"), ParseError);
    EXPECT_THROW((void)parse("n_sims = 5\nn_sims = 6\n"), ParseError);
    EXPECT_THROW((void)parse("methods = fancy\n"), ParseError);
    EXPECT_THROW((void)parse("just text\n"), ParseError);
}

TEST(Config, RoundTrip) {
    const auto c = parse(kSmallConfig);
    std::ostringstream out;
    write_config(out, c);
    const auto back = parse(out.str());
    EXPECT_EQ(back, c);
}

TEST(Config, ValidateRequiresFullCells) {
    EXPECT_THROW(validate(parse("process = ar1\nn = 10\nmethods = classical\n")), DomainError);
    EXPECT_THROW(validate(parse("process = iid\nmethods = classical\n")), DomainError);
    EXPECT_NO_THROW(validate(parse("process = iid\nn = 10\nmethods = classical\n")));
}

TEST(Grid, ExpansionOrderAndLabels) {
    const auto cells = expand_grid(parse("process = ma2\nphi0 = 1, 2\nphi1 = 0.5\nprocess = iid\nn = 10, 20\n"
                                         "methods = classical\n"));
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_EQ(cells[0].param, "phi0=1;phi1=0.5");
    EXPECT_EQ(cells[0].n, 10u);
    EXPECT_EQ(cells[1].n, 20u);
    EXPECT_EQ(cells[2].param, "phi0=2;phi1=0.5");
    EXPECT_EQ(cells[4].process, "iid");
    EXPECT_EQ(cells[4].param, "");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
    std::ostringstream out;
    write_csv(out, ResultTable{});
    EXPECT_EQ(out.str(), std::string(kResultCsvHeader) + "\n");
}

TEST(Csv, RoundTrip) {
    ResultTable t;
    t.rows.push_back({"ar1", "rho=0.6", 1000, "global-stud", 0.05, 1000, 1000, 0.049, mc_std_error(0.049, 1000), 7,
                      12.5});
    t.rows.push_back({"iid", "", 10, "classical", 0.1, 3, 0, std::nan(""), std::nan(""), 7, 0.25});
    std::ostringstream out;
    write_csv(out, t);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_EQ(back.rows[0].param, "rho=0.6");
    EXPECT_EQ(back.rows[0].reject_rate, 0.049);
    EXPECT_EQ(back.rows[0].mc_se, t.rows[0].mc_se);
    EXPECT_EQ(back.rows[1].param, "");
    EXPECT_TRUE(back.rows[1].failed());
    std::ostringstream again;
    write_csv(again, back);
    EXPECT_EQ(again.str(), out.str());
}

TEST(Run, DegenerateSingleSimulation) {
    auto c = parse("process = iid\nn = 20\nmethods = global-stud, classical\nn_sims = 1\nn_perms = 19\n");
    const auto t = run_experiment(c);
    ASSERT_EQ(t.rows.size(), 2u);
    for (const auto& r : t.rows) {
        EXPECT_TRUE(r.reject_rate == 0.0 || r.reject_rate == 1.0);
        EXPECT_EQ(r.mc_se, 0.0);
    }
}

TEST(Run, RowsAndMcError) {
    const auto c = parse(kSmallConfig);
    const auto t = run_experiment(c);
    EXPECT_EQ(t.rows.size(), (2 + 2) * 2 * 3u);
    EXPECT_TRUE(t.failures.empty());
    for (const auto& r : t.rows) {
        EXPECT_GE(r.reject_rate, 0.0);
        EXPECT_LE(r.reject_rate, 1.0);
        EXPECT_EQ(r.mc_se, std::sqrt(r.reject_rate * (1 - r.reject_rate) / r.n_sims));
        EXPECT_EQ(r.n_perms, r.method == "classical" ? 0u : 49u);
    }
}

TEST(Run, WorkerCountDoesNotChangeRows) {
    auto c = parse(kSmallConfig);
    c.workers = 1;
    const auto one = run_experiment(c);
    c.workers = 8;
    const auto eight = run_experiment(c);
    EXPECT_EQ(csv_without_wall_time(one), csv_without_wall_time(eight));
}

TEST(Run, EnvironmentOverridesWorkers) {
    setenv("TRENDPERM_WORKERS", "3", 1);
    EXPECT_EQ(resolve_workers(1), 3u);
    setenv("TRENDPERM_WORKERS", "0", 1);
    EXPECT_THROW((void)resolve_workers(1), DomainError);
    unsetenv("TRENDPERM_WORKERS");
    EXPECT_EQ(resolve_workers(5), 5u);
}

TEST(Run, FailedCellIsMarkedAndOthersComplete) {
    // n = 4 is too short for a local order of 5, n = 40 is fine
    const auto t = run_experiment(parse("process = iid\nn = 4, 40\nmethods = local-stud, classical\nM = 5\n"
                                        "n_sims = 5\nn_perms = 9\n"));
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_TRUE(t.rows[0].failed());
    EXPECT_FALSE(t.rows[1].failed());
    EXPECT_FALSE(t.rows[2].failed());
    EXPECT_EQ(t.failures.size(), 1u);
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_NE(out.str().find(",nan,nan,"), std::string::npos);
}

TEST(Run, AlphaSweepSharesReplicates) {
    const auto t = run_experiment(parse("process = iid\nn = 30\nmethods = global-unstud\nalpha = 0.05, 0.5\n"
                                        "n_sims = 40\nn_perms = 99\n"));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_LE(t.rows[0].reject_rate, t.rows[1].reject_rate);
}

TEST(PowerStudy, SmallRunIsCoherent) {
    PowerStudyConfig c;
    c.n = 200;
    c.n_sims = 100;
    c.n_perms = 999;
    c.h = {0.0, 3.0, 8.0};
    c.seed = 4;
    const auto r = run_power_study(c);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_NEAR(r.rows[0].pred_main, 0.05, 1e-12);
    EXPECT_NEAR(r.rows[0].pred_density_weighted, 0.05, 1e-12);
    EXPECT_GT(r.rows[2].empirical_power, r.rows[0].empirical_power);
    std::ostringstream out;
    write_power_csv(out, r);
    EXPECT_EQ(out.str().substr(0, kPowerCsvHeader.size()), kPowerCsvHeader);
    EXPECT_NE(power_study_log(r).find("matching variant"), std::string::npos);
}
