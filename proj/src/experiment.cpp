#include "trendperm/experiment.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/rng.hpp"
#include "trendperm/text.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace trendperm {

namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& allowed_params() {
    static const std::map<std::string, std::set<std::string>, std::less<>> table{
        {"iid", {"dist", "df", "h"}},
        {"mdep", {"m", "h"}},
        {"ar1", {"rho", "dist", "df", "h"}},
        {"ar2", {"rho", "h"}},
        {"ma2", {"phi0", "phi1", "dist", "df", "h"}},
        {"markov", {"chain_M", "epsilon", "jitter", "h"}},
        {"walk", {"c", "epsilon", "h"}},
    };
    return table;
}

const std::map<std::string, std::vector<std::string>, std::less<>>& required_params() {
    static const std::map<std::string, std::vector<std::string>, std::less<>> table{
        {"mdep", {"m"}},
        {"ar1", {"rho"}},
        {"ar2", {"rho"}},
        {"ma2", {"phi0", "phi1"}},
        {"markov", {"chain_M", "epsilon"}},
        {"walk", {"c", "epsilon"}},
    };
    return table;
}

bool is_process_param(std::string_view key) {
    for (const auto& [kind, keys] : allowed_params()) {
        if (keys.contains(std::string(key))) {
            return true;
        }
    }
    return false;
}

std::string normalize_key(std::string_view key) {
    if (key == "sims") return "n_sims";
    if (key == "perms") return "n_perms";
    if (key == "seed") return "master_seed";
    if (key == "method") return "methods";
    if (key == "null") return "null_mode";
    return std::string(key);
}

double require_double(std::string_view s, std::string_view key, std::size_t line) {
    const auto v = text::parse_double(s);
    if (!v || !std::isfinite(*v)) {
        throw ParseError("bad value '" + std::string(s) + "' for key '" + std::string(key) + "'", line);
    }
    return *v;
}

std::uint64_t require_uint(std::string_view s, std::string_view key, std::size_t line) {
    const auto v = text::parse_uint(s);
    if (!v) {
        throw ParseError("bad value '" + std::string(s) + "' for key '" + std::string(key) + "'", line);
    }
    return *v;
}

template <class F>
auto wrap_domain(F&& f, std::size_t line) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ParseError(e.what(), line);
    }
}

double param_double(const std::map<std::string, std::string>& point, const std::string& key, double fallback) {
    const auto it = point.find(key);
    if (it == point.end()) {
        return fallback;
    }
    const auto v = text::parse_double(it->second);
    if (!v) {
        throw DomainError("bad value '" + it->second + "' for process parameter '" + key + "'");
    }
    return *v;
}

Innovation param_innovation(const std::map<std::string, std::string>& point) {
    Innovation dist;
    if (const auto it = point.find("dist"); it != point.end()) {
        dist.kind = parse_innovation(it->second);
    }
    dist.df = param_double(point, "df", 5.0);
    return dist;
}

std::uint64_t param_uint(const std::map<std::string, std::string>& point, const std::string& key) {
    const auto v = text::parse_uint(point.at(key));
    if (!v) {
        throw DomainError("process parameter '" + key + "' must be a non-negative integer");
    }
    return *v;
}

ProcessSpec build_spec(const std::string& kind, const std::map<std::string, std::string>& point) {
    ProcessSpec spec;
    spec.drift = param_double(point, "h", 0.0);
    if (kind == "iid") {
        spec.kind = IidProcess{param_innovation(point)};
    } else if (kind == "mdep") {
        spec.kind = MDepProductProcess{static_cast<std::size_t>(param_uint(point, "m"))};
    } else if (kind == "ar1") {
        spec.kind = Ar1Process{param_double(point, "rho", 0.0), param_innovation(point)};
    } else if (kind == "ar2") {
        spec.kind = Ar2InterleavedProcess{param_double(point, "rho", 0.0)};
    } else if (kind == "ma2") {
        spec.kind = Ma2Process{param_double(point, "phi0", 1.0), param_double(point, "phi1", 0.0),
                               param_innovation(point)};
    } else if (kind == "markov") {
        bool jitter = true;
        if (const auto it = point.find("jitter"); it != point.end()) {
            if (it->second == "true" || it->second == "1") {
                jitter = true;
            } else if (it->second == "false" || it->second == "0") {
                jitter = false;
            } else {
                throw DomainError("jitter must be true or false");
            }
        }
        spec.kind = MarkovLocalProcess{static_cast<std::int64_t>(param_uint(point, "chain_M")),
                                       param_double(point, "epsilon", 0.1), jitter};
    } else if (kind == "walk") {
        spec.kind = DriftWalkProcess{param_double(point, "c", 1.0), param_double(point, "epsilon", 0.1)};
    } else {
        throw DomainError("unknown process kind '" + kind + "'");
    }
    return spec;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += items[i];
    }
    return out;
}

std::string format_rate(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    return text::format_double(x);
}

}  // namespace

ProcessSpec process_spec_from(const std::string& kind, const std::map<std::string, std::string>& params) {
    const auto allowed = allowed_params().find(kind);
    if (allowed == allowed_params().end()) {
        throw DomainError("unknown process kind '" + kind + "'");
    }
    for (const auto& [key, value] : params) {
        if (!allowed->second.contains(key)) {
            throw DomainError("parameter '" + key + "' does not apply to process '" + kind + "'");
        }
    }
    if (const auto req = required_params().find(kind); req != required_params().end()) {
        for (const auto& key : req->second) {
            if (!params.contains(key)) {
                throw DomainError("process '" + kind + "' needs parameter '" + key + "'");
            }
        }
    }
    return build_spec(kind, params);
}

void validate(const ExperimentConfig& config) {
    if (config.processes.empty()) {
        throw DomainError("config needs at least one process");
    }
    if (config.n.empty()) {
        throw DomainError("config needs at least one n");
    }
    if (config.methods.empty()) {
        throw DomainError("config needs at least one method");
    }
    if (config.alpha.empty()) {
        throw DomainError("config needs at least one alpha");
    }
    for (double a : config.alpha) {
        if (!(a > 0.0 && a < 1.0)) {
            throw DomainError("alpha must lie in (0, 1)");
        }
    }
    if (config.n_sims < 1 || config.n_perms < 1) {
        throw DomainError("n_sims and n_perms must be >= 1");
    }
    if (config.order < 1) {
        throw DomainError("local order M must be >= 1");
    }
    if (config.bandwidth && *config.bandwidth == 0) {
        throw DomainError("bandwidth must be >= 1");
    }
    for (std::size_t n : config.n) {
        if (n < 2) {
            throw DomainError("every n must be >= 2");
        }
    }
    for (const auto& proc : config.processes) {
        const auto allowed = allowed_params().find(proc.kind);
        if (allowed == allowed_params().end()) {
            throw DomainError("unknown process kind '" + proc.kind + "'");
        }
        for (const auto& [key, values] : proc.params) {
            if (!allowed->second.contains(key)) {
                throw DomainError("process '" + proc.kind + "' takes no parameter '" + key + "'");
            }
            if (values.empty()) {
                throw DomainError("process parameter '" + key + "' has an empty sweep");
            }
        }
        if (const auto req = required_params().find(proc.kind); req != required_params().end()) {
            for (const auto& key : req->second) {
                const bool present = std::any_of(proc.params.begin(), proc.params.end(),
                                                 [&](const auto& p) { return p.first == key; });
                if (!present) {
                    throw DomainError("process '" + proc.kind + "' needs parameter '" + key + "'");
                }
            }
        }
    }
    (void)expand_grid(config);
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.alpha.clear();
    std::set<std::string> seen;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = text::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", lineno);
        }
        const std::string given_key(text::trim(line.substr(0, eq)));
        const std::string key = normalize_key(given_key);
        const auto values = text::split(line.substr(eq + 1), ',');
        if (values.empty() || std::any_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); })) {
            throw ParseError("empty value for key '" + given_key + "'", lineno);
        }

        auto scalar = [&]() -> const std::string& {
            if (values.size() != 1) {
                throw ParseError("key '" + given_key + "' takes a single value", lineno);
            }
            if (!seen.insert(key).second) {
                throw ParseError("key '" + given_key + "' given more than once", lineno);
            }
            return values.front();
        };

        if (key == "process") {
            const auto& kind = values.size() == 1 ? values.front() : throw ParseError("one process per line", lineno);
            if (!allowed_params().contains(kind)) {
                throw ParseError("unknown process kind '" + kind + "'", lineno);
            }
            cfg.processes.push_back(ProcessTemplate{kind, {}});
        } else if (is_process_param(key)) {
            if (cfg.processes.empty()) {
                throw ParseError("process parameter '" + given_key + "' before any 'process' line", lineno);
            }
            auto& proc = cfg.processes.back();
            if (!allowed_params().at(proc.kind).contains(key)) {
                throw ParseError("process '" + proc.kind + "' takes no parameter '" + given_key + "'", lineno);
            }
            auto it = std::find_if(proc.params.begin(), proc.params.end(),
                                   [&](const auto& p) { return p.first == key; });
            if (it == proc.params.end()) {
                proc.params.emplace_back(key, std::vector<std::string>{});
                it = std::prev(proc.params.end());
            }
            it->second.insert(it->second.end(), values.begin(), values.end());
        } else if (key == "n") {
            for (const auto& v : values) {
                cfg.n.push_back(static_cast<std::size_t>(require_uint(v, given_key, lineno)));
            }
        } else if (key == "methods") {
            for (const auto& v : values) {
                cfg.methods.push_back(wrap_domain([&] { return parse_method(v); }, lineno));
            }
        } else if (key == "alpha") {
            for (const auto& v : values) {
                cfg.alpha.push_back(require_double(v, given_key, lineno));
            }
        } else if (key == "M") {
            cfg.order = static_cast<std::size_t>(require_uint(scalar(), given_key, lineno));
        } else if (key == "side") {
            const auto& v = scalar();
            cfg.side = wrap_domain([&] { return parse_side(v); }, lineno);
        } else if (key == "n_sims") {
            cfg.n_sims = static_cast<std::size_t>(require_uint(scalar(), given_key, lineno));
        } else if (key == "n_perms") {
            cfg.n_perms = static_cast<std::size_t>(require_uint(scalar(), given_key, lineno));
        } else if (key == "master_seed") {
            cfg.master_seed = require_uint(scalar(), given_key, lineno);
        } else if (key == "workers") {
            cfg.workers = static_cast<std::size_t>(require_uint(scalar(), given_key, lineno));
        } else if (key == "bandwidth") {
            cfg.bandwidth = static_cast<std::size_t>(require_uint(scalar(), given_key, lineno));
        } else if (key == "floor") {
            cfg.floor = require_double(scalar(), given_key, lineno);
        } else if (key == "null_mode") {
            const auto& v = scalar();
            cfg.null_mode = wrap_domain([&] { return parse_null_mode(v); }, lineno);
        } else {
            throw ParseError("unknown key '" + given_key + "'", lineno);
        }
    }
    if (cfg.alpha.empty()) {
        cfg.alpha.push_back(0.05);
    }
    return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config '" + path.string() + "'");
    }
    return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
    for (const auto& proc : config.processes) {
        out << "process = " << proc.kind << '\n';
        for (const auto& [key, values] : proc.params) {
            out << key << " = " << join(values) << '\n';
        }
    }
    std::vector<std::string> items;
    for (std::size_t n : config.n) {
        items.push_back(std::to_string(n));
    }
    out << "n = " << join(items) << '\n';
    items.clear();
    for (Method m : config.methods) {
        items.emplace_back(to_string(m));
    }
    out << "methods = " << join(items) << '\n';
    items.clear();
    for (double a : config.alpha) {
        items.push_back(text::format_double(a));
    }
    out << "alpha = " << join(items) << '\n';
    out << "M = " << config.order << '\n';
    out << "side = " << to_string(config.side) << '\n';
    out << "n_sims = " << config.n_sims << '\n';
    out << "n_perms = " << config.n_perms << '\n';
    out << "master_seed = " << config.master_seed << '\n';
    out << "workers = " << config.workers << '\n';
    if (config.bandwidth) {
        out << "bandwidth = " << *config.bandwidth << '\n';
    }
    out << "floor = " << text::format_double(config.floor) << '\n';
    out << "null_mode = " << to_string(config.null_mode) << '\n';
}

void write_config(const std::filesystem::path& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_config(out, config);
}

std::vector<GridCell> expand_grid(const ExperimentConfig& config) {
    std::vector<GridCell> cells;
    for (const auto& proc : config.processes) {
        std::vector<std::size_t> idx(proc.params.size(), 0);
        bool done = false;
        while (!done) {
            std::map<std::string, std::string> point;
            std::string label;
            for (std::size_t k = 0; k < proc.params.size(); ++k) {
                const auto& [key, values] = proc.params[k];
                point[key] = values[idx[k]];
                if (!label.empty()) {
                    label += ';';
                }
                label += key + "=" + values[idx[k]];
            }
            const ProcessSpec spec = build_spec(proc.kind, point);
            for (std::size_t n : config.n) {
                cells.push_back(GridCell{spec, proc.kind, label, n});
            }
            // odometer over the sweep lists, last parameter fastest
            done = true;
            for (std::size_t k = proc.params.size(); k-- > 0;) {
                if (++idx[k] < proc.params[k].second.size()) {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    return cells;
}

bool ResultRow::failed() const { return std::isnan(reject_rate); }

void write_csv(std::ostream& out, const ResultTable& table) {
    out << kResultCsvHeader << '\n';
    for (const auto& r : table.rows) {
        out << r.process << ',' << r.param << ',' << r.n << ',' << r.method << ',' << text::format_double(r.alpha)
            << ',' << r.n_sims << ',' << r.n_perms << ',' << format_rate(r.reject_rate) << ','
            << format_rate(r.mc_se) << ',' << r.seed << ',' << text::format_double(r.wall_time_s) << '\n';
    }
}

void write_csv(const ResultTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_csv(out, table);
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

ResultTable read_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError("missing CSV header", 1);
    }
    ++lineno;
    if (text::trim(line) != kResultCsvHeader) {
        throw ParseError("unexpected CSV header", lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) {
            continue;
        }
        // split keeps empty fields, so an empty param column survives
        std::vector<std::string> f;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            f.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            if (pos == std::string::npos) {
                break;
            }
            start = pos + 1;
        }
        if (f.size() != 11) {
            throw ParseError("expected 11 fields, found " + std::to_string(f.size()), lineno);
        }
        auto num = [&](const std::string& s) {
            if (text::trim(s) == "nan") {
                return std::numeric_limits<double>::quiet_NaN();
            }
            const auto v = text::parse_double(s);
            if (!v) {
                throw ParseError("bad number '" + s + "'", lineno);
            }
            return *v;
        };
        auto uint = [&](const std::string& s) {
            const auto v = text::parse_uint(s);
            if (!v) {
                throw ParseError("bad integer '" + s + "'", lineno);
            }
            return *v;
        };
        ResultRow r;
        r.process = f[0];
        r.param = f[1];
        r.n = static_cast<std::size_t>(uint(f[2]));
        r.method = f[3];
        r.alpha = num(f[4]);
        r.n_sims = static_cast<std::size_t>(uint(f[5]));
        r.n_perms = static_cast<std::size_t>(uint(f[6]));
        r.reject_rate = num(f[7]);
        r.mc_se = num(f[8]);
        r.seed = uint(f[9]);
        r.wall_time_s = num(f[10]);
        table.rows.push_back(std::move(r));
    }
    return table;
}

ResultTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    return read_csv(in);
}

double mc_std_error(double rate, std::size_t n_sims) {
    if (std::isnan(rate) || n_sims == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n_sims));
}

std::size_t resolve_workers(std::size_t configured) {
    if (const char* env = std::getenv("TRENDPERM_WORKERS"); env != nullptr && *env != '\0') {
        const auto v = text::parse_uint(env);
        if (!v || *v < 1) {
            throw DomainError("TRENDPERM_WORKERS must be an integer >= 1");
        }
        return static_cast<std::size_t>(*v);
    }
    if (configured == 0) {
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    return configured;
}

namespace {

struct MethodOutcome {
    std::optional<double> p;  ///< empty on error
    std::string error;
    double seconds = 0.0;
};

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
    validate(config);
    const auto cells = expand_grid(config);
    const std::size_t n_methods = config.methods.size();
    const std::size_t n_tasks = cells.size() * config.n_sims;
    std::vector<std::vector<MethodOutcome>> outcomes(n_tasks);

    auto run_task = [&](std::size_t task) {
        const std::size_t c = task / config.n_sims;
        const std::size_t r = task % config.n_sims;
        const GridCell& cell = cells[c];
        auto& out = outcomes[task];
        out.resize(n_methods);
        std::optional<TimeSeries> series;
        std::string gen_error;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            series.emplace(generate(cell.spec, cell.n, derive_seed(config.master_seed, {c, r})));
        } catch (const std::exception& e) {
            gen_error = std::string("series generation: ") + e.what();
        }
        const double gen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t k = 0; k < n_methods; ++k) {
            const Method method = config.methods[k];
            const auto method_key = static_cast<std::uint64_t>(method);
            auto& o = out[k];
            if (!series) {
                o.error = gen_error;
                o.seconds = gen_seconds;
                continue;
            }
            TestOptions opts;
            opts.alpha = config.alpha.front();
            opts.side = config.side;
            opts.permutations = config.n_perms;
            opts.bandwidth = config.bandwidth;
            opts.floor = config.floor;
            opts.null_mode = config.null_mode;
            // a tabulated null is shared by every replicate of the cell
            opts.seed = config.null_mode == NullMode::Tabulated
                            ? derive_seed(config.master_seed, {c, method_key})
                            : derive_seed(config.master_seed, {c, r, method_key});
            const auto m0 = std::chrono::steady_clock::now();
            try {
                o.p = run_test(method, *series, opts, config.order).p_value.p;
            } catch (const std::exception& e) {
                o.error = e.what();
            }
            o.seconds = gen_seconds / static_cast<double>(n_methods) +
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - m0).count();
        }
    };

    const std::size_t workers = std::min(resolve_workers(config.workers), std::max<std::size_t>(1, n_tasks));
    if (workers <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) {
            run_task(t);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) {
                    run_task(t);
                }
            });
        }
    }

    ResultTable table;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const GridCell& cell = cells[c];
        for (std::size_t k = 0; k < n_methods; ++k) {
            const Method method = config.methods[k];
            std::string first_error;
            std::size_t errors = 0;
            double seconds = 0.0;
            for (std::size_t r = 0; r < config.n_sims; ++r) {
                const auto& o = outcomes[c * config.n_sims + r][k];
                seconds += o.seconds;
                if (!o.p) {
                    if (errors++ == 0) {
                        first_error = o.error;
                    }
                }
            }
            if (errors > 0) {
                std::ostringstream msg;
                msg << cell.process << ' ' << cell.param << " n=" << cell.n << ' ' << to_string(method) << ": "
                    << errors << " of " << config.n_sims << " replicates failed (" << first_error << ')';
                table.failures.push_back(msg.str());
            }
            for (double alpha : config.alpha) {
                ResultRow row;
                row.process = cell.process;
                row.param = cell.param;
                row.n = cell.n;
                row.method = std::string(to_string(method));
                row.alpha = alpha;
                row.n_sims = config.n_sims;
                row.n_perms = method == Method::Classical ? 0 : config.n_perms;
                row.seed = config.master_seed;
                row.wall_time_s = seconds;
                if (errors > 0) {
                    row.reject_rate = std::numeric_limits<double>::quiet_NaN();
                    row.mc_se = std::numeric_limits<double>::quiet_NaN();
                } else {
                    std::size_t rejects = 0;
                    for (std::size_t r = 0; r < config.n_sims; ++r) {
                        if (*outcomes[c * config.n_sims + r][k].p <= alpha) {
                            ++rejects;
                        }
                    }
                    row.reject_rate = static_cast<double>(rejects) / static_cast<double>(config.n_sims);
                    row.mc_se = mc_std_error(row.reject_rate, config.n_sims);
                }
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

}  // namespace trendperm
