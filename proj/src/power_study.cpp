#include "trendperm/power_study.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/experiment.hpp"
#include "trendperm/processes.hpp"
#include "trendperm/rng.hpp"
#include "trendperm/text.hpp"
#include "trendperm/trend_tests.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace trendperm {

namespace {

constexpr std::uint64_t kNullStream = 0x6e756c6c;  // "null"

std::string classify(double empirical, double main, double weighted, double tol) {
    const bool m = std::abs(empirical - main) <= tol;
    const bool w = std::abs(empirical - weighted) <= tol;
    if (m && w) return "both";
    if (m) return "main";
    if (w) return "density-weighted";
    return "neither";
}

}  // namespace

std::string PowerStudyResult::overall_match() const {
    bool main_all = true;
    bool weighted_all = true;
    bool any = false;
    for (const auto& r : rows) {
        if (r.h == 0.0) {
            continue;
        }
        any = true;
        main_all = main_all && (r.matching_variant == "main" || r.matching_variant == "both");
        weighted_all = weighted_all && (r.matching_variant == "density-weighted" || r.matching_variant == "both");
    }
    if (!any) return "both";
    if (main_all && weighted_all) return "both";
    if (main_all) return "main";
    if (weighted_all) return "density-weighted";
    return "neither";
}

std::string PowerStudyResult::closest_variant() const {
    double main_err = 0.0;
    double weighted_err = 0.0;
    for (const auto& r : rows) {
        main_err += std::abs(r.empirical_power - r.pred_main);
        weighted_err += std::abs(r.empirical_power - r.pred_density_weighted);
    }
    if (main_err == weighted_err) return "tie";
    return main_err < weighted_err ? "main" : "density-weighted";
}

bool PowerStudyResult::monotone() const {
    std::vector<std::pair<double, double>> curve;
    for (const auto& r : rows) {
        curve.emplace_back(r.h, r.empirical_power);
    }
    std::sort(curve.begin(), curve.end());
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].second < curve[i - 1].second) {
            return false;
        }
    }
    return true;
}

PowerStudyResult run_power_study(const PowerStudyConfig& config) {
    if (config.h.empty()) {
        throw DomainError("power study needs at least one h");
    }
    if (config.n < 3 || config.n_sims < 1 || config.n_perms < 1) {
        throw DomainError("power study needs n >= 3, n_sims >= 1 and n_perms >= 1");
    }
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
    if (!(std::abs(config.rho) < 1.0)) {
        throw DomainError("|rho| must be < 1");
    }

    TestOptions opts;
    opts.alpha = config.alpha;
    opts.side = Side::Greater;
    opts.permutations = config.n_perms;
    opts.null_mode = NullMode::Tabulated;
    opts.seed = derive_seed(config.seed, {kNullStream});

    const std::size_t nh = config.h.size();
    std::vector<double> pvalues(config.n_sims * nh);
    std::vector<double> seconds(config.n_sims * nh);

    // warm the shared null before the pool starts so no worker waits on it
    (void)global_studentized_test(gen_iid(config.n, Innovation::gaussian(), config.seed), opts);

    auto run_replicate = [&](std::size_t r) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t s = derive_seed(config.seed, {r});
        const TimeSeries base = config.rho == 0.0 ? gen_iid(config.n, Innovation::gaussian(), s)
                                                  : gen_ar1(config.n, config.rho, s);
        const double gen = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (std::size_t k = 0; k < nh; ++k) {
            const auto t1 = std::chrono::steady_clock::now();
            const TimeSeries y = add_linear_drift(base, config.h[k]);
            pvalues[r * nh + k] = global_studentized_test(y, opts).p_value.p;
            seconds[r * nh + k] =
                gen / static_cast<double>(nh) +
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        }
    };

    const std::size_t workers = std::min(resolve_workers(config.workers), config.n_sims);
    if (workers <= 1) {
        for (std::size_t r = 0; r < config.n_sims; ++r) {
            run_replicate(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next.fetch_add(1); r < config.n_sims; r = next.fetch_add(1)) {
                    run_replicate(r);
                }
            });
        }
    }

    double sigma = 2.0 / 3.0;
    double marginal_sd = 1.0;
    if (config.rho != 0.0) {
        sigma = std::sqrt(gaussian_ar1_sigma_sq(config.rho));
        marginal_sd = 1.0 / std::sqrt(1.0 - config.rho * config.rho);
    }

    PowerStudyResult result;
    result.config = config;
    for (std::size_t k = 0; k < nh; ++k) {
        PowerRow row;
        row.h = config.h[k];
        row.n = config.n;
        row.alpha = config.alpha;
        row.n_sims = config.n_sims;
        row.n_perms = config.n_perms;
        std::size_t rejects = 0;
        for (std::size_t r = 0; r < config.n_sims; ++r) {
            rejects += pvalues[r * nh + k] <= config.alpha ? 1 : 0;
            row.wall_time_s += seconds[r * nh + k];
        }
        row.empirical_power = static_cast<double>(rejects) / static_cast<double>(config.n_sims);
        row.mc_se = mc_std_error(row.empirical_power, config.n_sims);
        row.pred_main = limiting_power_ar1(row.h, config.alpha, sigma).power;
        row.pred_density_weighted = limiting_power_ar1_density_weighted(row.h, config.alpha, sigma, marginal_sd).power;
        row.matching_variant =
            classify(row.empirical_power, row.pred_main, row.pred_density_weighted, config.match_tolerance);
        result.rows.push_back(std::move(row));
    }
    return result;
}

void write_power_csv(std::ostream& out, const PowerStudyResult& result) {
    const auto& c = result.config;
    out << kPowerCsvHeader << '\n';
    for (const auto& r : result.rows) {
        out << (c.rho == 0.0 ? "iid" : "ar1") << ',' << text::format_double(c.rho) << ','
            << text::format_double(r.h) << ',' << r.n << ',' << text::format_double(r.alpha) << ',' << r.n_sims << ','
            << r.n_perms << ',' << text::format_double(r.empirical_power) << ',' << text::format_double(r.mc_se)
            << ',' << text::format_double(r.pred_main) << ',' << text::format_double(r.pred_density_weighted) << ','
            << r.matching_variant << ',' << c.seed << ',' << text::format_double(r.wall_time_s) << '\n';
    }
}

void write_power_csv(const PowerStudyResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    write_power_csv(out, result);
}

std::string power_study_log(const PowerStudyResult& result) {
    std::ostringstream out;
    const auto& c = result.config;
    out << "power study: base=" << (c.rho == 0.0 ? "iid" : "ar1") << " rho=" << c.rho << " n=" << c.n
        << " sims=" << c.n_sims << " null_perms=" << c.n_perms << " alpha=" << c.alpha << '\n';
    for (const auto& r : result.rows) {
        out << "  h=" << r.h << " empirical=" << r.empirical_power << " (se " << r.mc_se << ")"
            << " main=" << r.pred_main << " density-weighted=" << r.pred_density_weighted
            << " match=" << r.matching_variant;
        if (r.mc_se > 0.0) {
            out << " z_main=" << (r.empirical_power - r.pred_main) / r.mc_se
                << " z_density-weighted=" << (r.empirical_power - r.pred_density_weighted) / r.mc_se;
        }
        out << '\n';
    }
    out << "monotone in h: " << (result.monotone() ? "yes" : "no") << '\n';
    out << "matching variant (tolerance " << c.match_tolerance << "): " << result.overall_match() << '\n';
    out << "closest variant (summed absolute error): " << result.closest_variant() << '\n';
    return out.str();
}

}  // namespace trendperm
