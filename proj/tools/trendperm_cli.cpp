// trendperm command line tool.
//
// Exit status: 0 on success, 2 on a usage error, 1 on any runtime error.

#include "trendperm/errors.hpp"
#include "trendperm/experiment.hpp"
#include "trendperm/null_table.hpp"
#include "trendperm/power_study.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/series_io.hpp"
#include "trendperm/statistic.hpp"
#include "trendperm/text.hpp"
#include "trendperm/trend_tests.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace trendperm;

namespace {

template <class Map>
std::vector<std::string> names_of(const Map& map) {
    std::vector<std::string> out;
    for (const auto& [name, value] : map) out.push_back(name);
    return out;
}

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

const std::map<std::string, Method> kMethodNames{
    {"global-stud", Method::GlobalStudentized}, {"global_stud", Method::GlobalStudentized},
    {"global-unstud", Method::GlobalUnstudentized}, {"global_unstud", Method::GlobalUnstudentized},
    {"classical", Method::Classical},
    {"local-stud", Method::LocalStudentized}, {"local_stud", Method::LocalStudentized},
    {"local-unstud", Method::LocalUnstudentized}, {"local_unstud", Method::LocalUnstudentized},
};

const std::map<std::string, Side> kSideNames{
    {"greater", Side::Greater}, {"less", Side::Less}, {"two-sided", Side::TwoSided}, {"two_sided", Side::TwoSided}};

const std::map<std::string, NullMode> kNullNames{
    {"sampled", NullMode::Sampled}, {"exact", NullMode::Exact}, {"tabulated", NullMode::Tabulated}};

const std::map<std::string, StatisticKind> kKindNames{
    {"global-stud", StatisticKind::GlobalStudentized}, {"global_stud", StatisticKind::GlobalStudentized},
    {"global-unstud", StatisticKind::GlobalUnstudentized}, {"global_unstud", StatisticKind::GlobalUnstudentized},
    {"local-stud", StatisticKind::LocalStudentized}, {"local_stud", StatisticKind::LocalStudentized},
    {"local-unstud", StatisticKind::LocalUnstudentized}, {"local_unstud", StatisticKind::LocalUnstudentized},
};

struct TestArgs {
    std::string file;
    std::string method = "global-stud";
    std::string side = "greater";
    std::string null_mode = "sampled";
    TestOptions options;
    std::size_t order = 5;
    std::size_t bandwidth = 0;
    std::string ties = "reject";
    std::uint64_t tie_seed = 0;
    bool json = false;
};

struct SimulateArgs {
    std::string process;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::map<std::string, std::string> params;
};

struct ExperimentArgs {
    std::string config;
    std::string out;
    std::optional<std::size_t> workers;
};

struct TabulateArgs {
    std::string kind;
    std::size_t n = 0;
    std::size_t order = 5;
    std::size_t permutations = 10000;
    std::uint64_t seed = 0;
    std::size_t bandwidth = 0;
    double floor = kDefaultVarianceFloor;
    std::string out;
};

struct PowerArgs {
    PowerStudyConfig config;
    std::string out;
    std::string log;
};

int run_test_command(const TestArgs& a) {
    const auto values = read_series_values(std::filesystem::path(a.file));
    TiePolicy policy = RejectTies{};
    if (a.ties == "random") policy = RandomTieBreak{a.tie_seed};
    const TimeSeries series(values, policy);
    TestOptions o = a.options;
    o.side = kSideNames.at(a.side);
    o.null_mode = kNullNames.at(a.null_mode);
    if (a.bandwidth > 0) o.bandwidth = a.bandwidth;
    const auto report = run_test(kMethodNames.at(a.method), series, o, a.order);
    std::cout << format_report(report);
    if (a.json) std::cout << report_to_json(report) << '\n';
    return 0;
}

int run_simulate_command(const SimulateArgs& a) {
    const auto spec = process_spec_from(a.process, a.params);
    const auto series = generate(spec, a.n, a.seed);
    if (a.out.empty() || a.out == "-") {
        write_series(std::cout, series.values(), SeriesFormat::PlainText);
    } else {
        write_series(std::filesystem::path(a.out), series.values());
    }
    return 0;
}

int run_experiment_command(const ExperimentArgs& a) {
    auto config = read_config(std::filesystem::path(a.config));
    if (a.workers) config.workers = *a.workers;
    const auto table = run_experiment(config);
    if (a.out.empty() || a.out == "-") {
        write_csv(std::cout, table);
    } else {
        write_csv(table, std::filesystem::path(a.out));
    }
    for (const auto& f : table.failures) std::cerr << "failed: " << f << '\n';
    return table.failures.empty() ? 0 : kRuntimeError;
}

int run_tabulate_command(const TabulateArgs& a) {
    StatisticParams params{kKindNames.at(a.kind), a.order};
    if (a.bandwidth > 0) params.bandwidth = a.bandwidth;
    params.floor = a.floor;
    const auto key = make_null_key(params, a.n, a.permutations, a.seed);
    const auto dist = compute_null(key);
    save_null_table(std::filesystem::path(a.out), key, dist);
    std::cout << "kind=" << to_string(key.kind) << '\n'
              << "n=" << key.n << '\n'
              << "values=" << dist.size() << '\n'
              << "exact=" << (dist.is_exact() ? "true" : "false") << '\n'
              << "mean=" << text::format_double(dist.mean()) << '\n'
              << "variance=" << text::format_double(dist.variance()) << '\n'
              << "q95=" << text::format_double(dist.quantile(0.95)) << '\n'
              << "out=" << a.out << '\n';
    return 0;
}

int run_power_command(const PowerArgs& a) {
    auto config = a.config;
    config.workers = resolve_workers(config.workers);
    const auto result = run_power_study(config);
    if (a.out.empty() || a.out == "-") {
        write_power_csv(std::cout, result);
    } else {
        write_power_csv(result, std::filesystem::path(a.out));
    }
    const auto log_text = power_study_log(result);
    if (a.log.empty()) {
        std::cerr << log_text;
    } else {
        std::ofstream(a.log) << log_text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mann-Kendall permutation trend tests for dependent time series", "trendperm_cli"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "trendperm 0.1.0");

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "run one trend test on a series file");
    test->add_option("file", test_args.file, "series file, one value per line or a single-column CSV")
        ->required()
        ->check(CLI::ExistingFile);
    test->add_option("--method", test_args.method, "global-stud, global-unstud, classical, local-stud, local-unstud")
        ->check(CLI::IsMember(names_of(kMethodNames)));
    test->add_option("--alpha", test_args.options.alpha, "level")->check(CLI::Range(0.0, 1.0));
    test->add_option("--side", test_args.side, "greater, less or two-sided")
        ->check(CLI::IsMember(names_of(kSideNames)));
    test->add_option("--perms,-B", test_args.options.permutations, "number of sampled permutations")
        ->check(CLI::PositiveNumber);
    test->add_option("--seed", test_args.options.seed, "permutation seed");
    test->add_option("--order,-M", test_args.order, "local order M (local methods)")->check(CLI::PositiveNumber);
    test->add_option("--bandwidth", test_args.bandwidth, "studentizer lag, default floor(n^(1/3))")
        ->check(CLI::PositiveNumber);
    test->add_option("--floor", test_args.options.floor, "variance floor")->check(CLI::PositiveNumber);
    test->add_option("--null", test_args.null_mode, "sampled, exact or tabulated")
        ->check(CLI::IsMember(names_of(kNullNames)));
    test->add_option("--ties", test_args.ties, "reject or random")->check(CLI::IsMember({"reject", "random"}));
    test->add_option("--tie-seed", test_args.tie_seed, "seed for random tie breaking");
    test->add_flag("--json", test_args.json, "also print the report as one JSON line");

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "write a simulated series");
    simulate->add_option("--process", sim_args.process, "iid, mdep, ar1, ar2, ma2, markov, walk")
        ->required()
        ->check(CLI::IsMember({"iid", "mdep", "ar1", "ar2", "ma2", "markov", "walk"}));
    simulate->add_option("--n", sim_args.n, "series length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_args.seed, "generator seed");
    simulate->add_option("--out", sim_args.out, "output path (.csv for CSV), stdout when omitted");
    const std::vector<std::pair<std::string, std::string>> sim_params{
        {"rho", "AR coefficient (ar1, ar2)"},   {"m", "dependence range (mdep)"},
        {"phi0", "MA weight (ma2)"},           {"phi1", "MA lag-one weight (ma2)"},
        {"dist", "gaussian, uniform or t"},    {"df", "Student-t degrees of freedom"},
        {"chain-M", "chain half range (markov)"}, {"epsilon", "reset probability (markov, walk)"},
        {"jitter", "true or false (markov)"},  {"c", "down step (walk)"},
        {"drift", "linear drift h, adds h i / n^(3/2)"},
    };
    std::map<std::string, std::string> sim_values;
    for (const auto& [name, help] : sim_params) {
        simulate->add_option("--" + name, sim_values[name], help);
    }

    ExperimentArgs exp_args;
    auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo grid from a config file");
    experiment->add_option("--config", exp_args.config, "config file")->required()->check(CLI::ExistingFile);
    experiment->add_option("--out", exp_args.out, "CSV path, stdout when omitted");
    experiment->add_option("--workers", exp_args.workers, "worker threads, 0 for all cores");

    TabulateArgs tab_args;
    auto* tabulate = app.add_subcommand("tabulate", "compute and save a permutation null table");
    tabulate->add_option("--kind", tab_args.kind, "global-stud, global-unstud, local-stud, local-unstud")
        ->required()
        ->check(CLI::IsMember(names_of(kKindNames)));
    tabulate->add_option("--n", tab_args.n, "series length")->required()->check(CLI::Range(3, 1 << 24));
    tabulate->add_option("--order,-M", tab_args.order, "local order")->check(CLI::PositiveNumber);
    tabulate->add_option("--perms,-B", tab_args.permutations, "sampled permutations, 0 for exact enumeration");
    tabulate->add_option("--seed", tab_args.seed, "permutation seed");
    tabulate->add_option("--bandwidth", tab_args.bandwidth, "studentizer lag")->check(CLI::PositiveNumber);
    tabulate->add_option("--floor", tab_args.floor, "variance floor")->check(CLI::PositiveNumber);
    tabulate->add_option("--out", tab_args.out, "output file")->required();

    PowerArgs pow_args;
    auto* power = app.add_subcommand("power", "empirical against predicted power under a linear drift");
    power->add_option("--rho", pow_args.config.rho, "AR(1) coefficient of the base, 0 for white noise")
        ->check(CLI::Range(-0.999, 0.999));
    power->add_option("--drift", pow_args.config.h, "drift sizes h, comma separated")->delimiter(',');
    power->add_option("--n", pow_args.config.n, "series length")->check(CLI::Range(3, 1 << 24));
    power->add_option("--sims", pow_args.config.n_sims, "replicates")->check(CLI::PositiveNumber);
    power->add_option("--perms", pow_args.config.n_perms, "size of the tabulated null")->check(CLI::PositiveNumber);
    power->add_option("--alpha", pow_args.config.alpha, "level")->check(CLI::Range(0.0, 1.0));
    power->add_option("--seed", pow_args.config.seed, "master seed");
    power->add_option("--workers", pow_args.config.workers, "worker threads, 0 for all cores");
    power->add_option("--tolerance", pow_args.config.match_tolerance, "match tolerance for predictions");
    power->add_option("--out", pow_args.out, "CSV path, stdout when omitted");
    power->add_option("--log", pow_args.log, "summary path, stderr when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

    try {
        if (*test) return run_test_command(test_args);
        if (*simulate) {
            for (const auto& [name, value] : sim_values) {
                if (!value.empty()) sim_args.params[name == "chain-M" ? "chain_M" : name == "drift" ? "h" : name] = value;
            }
            return run_simulate_command(sim_args);
        }
        if (*experiment) return run_experiment_command(exp_args);
        if (*tabulate) return run_tabulate_command(tab_args);
        if (*power) return run_power_command(pow_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
