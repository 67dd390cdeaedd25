#include "trendperm/errors.hpp"
#include "trendperm/experiment.hpp"
#include "trendperm/null_table.hpp"
#include "trendperm/power.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/series.hpp"
#include "trendperm/trend_tests.hpp"
#include "trendperm/variance.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace trendperm;

namespace {

TimeSeries make_series(const std::vector<double>& values, std::optional<std::uint64_t> tie_seed) {
    if (tie_seed) return TimeSeries(values, RandomTieBreak{*tie_seed});
    return TimeSeries(values);
}

py::dict variance_dict(const VarianceEstimate& v) {
    py::dict d;
    d["value"] = v.value;
    d["raw_value"] = v.raw_value;
    d["bandwidth"] = v.bandwidth;
    d["floored"] = v.floored;
    return d;
}

py::dict report_dict(const TestReport& r) {
    py::dict d;
    d["method"] = r.method;
    d["n"] = r.n;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value.p;
    d["alpha"] = r.alpha;
    d["reject"] = r.reject;
    d["side"] = std::string(to_string(r.side));
    d["null"] = r.null_mode;
    d["order"] = r.order ? py::cast(*r.order) : py::none();
    d["permutations"] = r.permutations ? py::cast(*r.permutations) : py::none();
    d["seed"] = r.seed ? py::cast(*r.seed) : py::none();
    d["studentizer"] = r.studentizer ? py::object(variance_dict(*r.studentizer)) : py::none();
    return d;
}

py::list table_rows(const ResultTable& t) {
    py::list rows;
    for (const auto& r : t.rows) {
        py::dict d;
        d["process"] = r.process;
        d["param"] = r.param;
        d["n"] = r.n;
        d["method"] = r.method;
        d["alpha"] = r.alpha;
        d["n_sims"] = r.n_sims;
        d["n_perms"] = r.n_perms;
        d["reject_rate"] = r.reject_rate;
        d["mc_se"] = r.mc_se;
        d["seed"] = r.seed;
        d["wall_time_s"] = r.wall_time_s;
        rows.append(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_trendperm, m) {
    m.doc() = "Mann-Kendall permutation trend tests for weakly dependent series";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<TieError>(m, "TieError", PyExc_ValueError);
    py::register_exception<LimitError>(m, "LimitError", PyExc_OverflowError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    m.def("global_mk", [](const std::vector<double>& x) { return global_mk(TimeSeries(x)); }, py::arg("values"),
          "U_n, the normalized count of concordant minus discordant pairs.");
    m.def("local_mk", [](const std::vector<double>& x, std::size_t g) { return local_mk(TimeSeries(x), g); },
          py::arg("values"), py::arg("g"));
    m.def("local_increments",
          [](const std::vector<double>& x, std::size_t window) { return local_increments(TimeSeries(x), window).y; },
          py::arg("values"), py::arg("window"));
    m.def("ranks", [](const std::vector<double>& x, std::optional<std::uint64_t> tie_seed) {
              return make_series(x, tie_seed).ranks().values();
          },
          py::arg("values"), py::arg("tie_seed") = py::none());

    m.def("global_variance",
          [](const std::vector<double>& x, std::optional<std::size_t> bandwidth, double floor) {
              const TimeSeries s(x);
              const std::size_t b = bandwidth ? *bandwidth : bandwidth_default(s.size());
              return variance_dict(global_variance(s, b, floor));
          },
          py::arg("values"), py::arg("bandwidth") = py::none(), py::arg("floor") = kDefaultVarianceFloor);
    m.def("local_variance",
          [](const std::vector<double>& x, std::size_t window, std::optional<std::size_t> bandwidth, double floor) {
              const TimeSeries s(x);
              const std::size_t b = bandwidth ? *bandwidth : bandwidth_default(s.size());
              return variance_dict(local_variance(local_increments(s, window), b, floor));
          },
          py::arg("values"), py::arg("window"), py::arg("bandwidth") = py::none(),
          py::arg("floor") = kDefaultVarianceFloor);
    m.def("bandwidth_default", &bandwidth_default, py::arg("n"));

    m.def("run_test",
          [](const std::string& method, const std::vector<double>& x, double alpha, const std::string& side,
             std::size_t permutations, std::uint64_t seed, std::size_t order, std::optional<std::size_t> bandwidth,
             double floor, const std::string& null_mode, std::optional<std::uint64_t> tie_seed) {
              TestOptions o;
              o.alpha = alpha;
              o.side = parse_side(side);
              o.permutations = permutations;
              o.seed = seed;
              o.bandwidth = bandwidth;
              o.floor = floor;
              o.null_mode = parse_null_mode(null_mode);
              TestReport r;
              {
                  py::gil_scoped_release release;
                  r = run_test(parse_method(method), make_series(x, tie_seed), o, order);
              }
              return report_dict(r);
          },
          py::arg("method"), py::arg("values"), py::arg("alpha") = 0.05, py::arg("side") = "greater",
          py::arg("permutations") = 1000, py::arg("seed") = 0, py::arg("order") = 5,
          py::arg("bandwidth") = py::none(), py::arg("floor") = kDefaultVarianceFloor,
          py::arg("null_mode") = "sampled", py::arg("tie_seed") = py::none(),
          "Runs one of global-stud, global-unstud, classical, local-stud, local-unstud and returns the report.");

    m.def("simulate",
          [](const std::string& process, std::size_t n, std::uint64_t seed, const py::kwargs& params) {
              std::map<std::string, std::string> p;
              for (const auto& [key, value] : params) p[py::str(key)] = py::str(value);
              const auto s = generate(process_spec_from(process, p), n, seed);
              return std::vector<double>(s.values().begin(), s.values().end());
          },
          py::arg("process"), py::arg("n"), py::arg("seed") = 0,
          "Series from a process kind (iid, mdep, ar1, ar2, ma2, markov, walk) and its parameters.");

    m.def("exact_null",
          [](const std::string& kind, std::size_t n, std::size_t order) {
              return tabulate_null(make_null_key({parse_statistic_kind(kind), order}, n, 0, 0))->values;
          },
          py::arg("kind"), py::arg("n"), py::arg("order") = 1,
          "Sorted values of a statistic over all n! arrangements.");

    m.def("run_experiment",
          [](const std::string& config_text) {
              std::istringstream in(config_text);
              const auto config = parse_config(in);
              ResultTable t;
              {
                  py::gil_scoped_release release;
                  t = run_experiment(config);
              }
              return py::make_tuple(table_rows(t), t.failures);
          },
          py::arg("config"), "Runs a config given as text; returns (rows, failures).");

    m.def("nu_n", [](const std::vector<double>& mu) { return nu_n(mu); }, py::arg("mu"));
    m.def("gaussian_ar1_sigma_sq", &gaussian_ar1_sigma_sq, py::arg("rho"));
    m.def("local_exact_variance", &local_exact_variance, py::arg("n"), py::arg("g"));
    m.def("limiting_power_whitenoise", [](double h, double alpha) { return limiting_power_whitenoise(h, alpha).power; },
          py::arg("h"), py::arg("alpha") = 0.05);
    m.def("limiting_power_whitenoise_density_weighted",
          [](double h, double alpha) { return limiting_power_whitenoise_density_weighted(h, alpha).power; },
          py::arg("h"), py::arg("alpha") = 0.05);
}
