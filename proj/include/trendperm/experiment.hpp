#pragma once

#include "trendperm/permutation.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/trend_tests.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trendperm {

/// One `process = kind` block of a config. Every parameter holds a sweep list;
/// the block expands to the cartesian product of its lists, in the order the
/// parameters were first given.
struct ProcessTemplate {
    std::string kind;  ///< iid, mdep, ar1, ar2, ma2, markov, walk
    std::vector<std::pair<std::string, std::vector<std::string>>> params;

    friend bool operator==(const ProcessTemplate&, const ProcessTemplate&) = default;
};

struct ExperimentConfig {
    std::vector<ProcessTemplate> processes;
    std::vector<std::size_t> n;
    std::vector<Method> methods;
    std::size_t order = 5;  ///< M, the local order
    std::vector<double> alpha{0.05};
    Side side = Side::Greater;
    std::size_t n_sims = 1000;
    std::size_t n_perms = 1000;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;  ///< 0 = hardware concurrency
    std::optional<std::size_t> bandwidth;
    double floor = kDefaultVarianceFloor;
    NullMode null_mode = NullMode::Sampled;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws DomainError when a field is out of range or a grid cell is not
/// fully specified.
void validate(const ExperimentConfig& config);

/// Line-oriented `key = value` format. Values may be comma lists and a
/// repeated list key appends to its sweep. `#` starts a comment. Throws
/// ParseError naming the key and line for unknown keys and bad values.
[[nodiscard]] ExperimentConfig parse_config(std::istream& in);
[[nodiscard]] ExperimentConfig read_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& config);
void write_config(const std::filesystem::path& path, const ExperimentConfig& config);

/// Process from a kind name and single parameter values, using the config
/// file's names (e.g. "ar1" with {"rho", "0.6"}). Throws DomainError on an
/// unknown kind, a parameter the kind does not take, or a missing one.
[[nodiscard]] ProcessSpec process_spec_from(const std::string& kind, const std::map<std::string, std::string>& params);

/// A fully specified process at one parameter point.
struct GridCell {
    ProcessSpec spec;
    std::string process;  ///< process kind name
    std::string param;    ///< e.g. "rho=0.6", several joined by ';'
    std::size_t n = 0;
};

/// Cells in config order: process block, then parameter combination, then n.
[[nodiscard]] std::vector<GridCell> expand_grid(const ExperimentConfig& config);

struct ResultRow {
    std::string process;
    std::string param;
    std::size_t n = 0;
    std::string method;
    double alpha = 0.05;
    std::size_t n_sims = 0;
    std::size_t n_perms = 0;
    double reject_rate = 0.0;  ///< NaN when the cell failed
    double mc_se = 0.0;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;

    [[nodiscard]] bool failed() const;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<std::string> failures;  ///< one message per failed cell and method
};

inline constexpr std::string_view kResultCsvHeader =
    "process,param,n,method,alpha,n_sims,n_perms,reject_rate,mc_se,seed,wall_time_s";

void write_csv(std::ostream& out, const ResultTable& table);
void write_csv(const ResultTable& table, const std::filesystem::path& path);
[[nodiscard]] ResultTable read_csv(std::istream& in);
[[nodiscard]] ResultTable read_csv(const std::filesystem::path& path);

/// sqrt(r (1 - r) / n_sims).
[[nodiscard]] double mc_std_error(double rate, std::size_t n_sims);

/// Workers actually used: TRENDPERM_WORKERS when set (an integer >= 1),
/// otherwise `configured`, with 0 meaning hardware concurrency.
[[nodiscard]] std::size_t resolve_workers(std::size_t configured);

/// Runs every (cell, replicate) task on a worker pool. Replicate r of cell c
/// draws its series from stream (seed, c, r) and every method sees that same
/// series; method k permutes with stream (seed, c, r, k). Results are merged
/// by task index, so rows do not depend on the worker count. A replicate
/// error marks that cell and method as failed without stopping the run.
[[nodiscard]] ResultTable run_experiment(const ExperimentConfig& config);

}  // namespace trendperm
