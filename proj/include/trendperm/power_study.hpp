#pragma once

#include "trendperm/power.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace trendperm {

/// Empirical power of the studentized global test under a linear drift
/// h i / n^{3/2}, set against both limiting-power predictions.
struct PowerStudyConfig {
    double rho = 0.0;  ///< 0 gives the white-noise base, otherwise Gaussian AR(1)
    std::vector<double> h{0.0, 2.0, 4.0};
    std::size_t n = 2000;
    std::size_t n_sims = 2000;
    std::size_t n_perms = 10000;  ///< size of the shared tabulated null
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double match_tolerance = 0.05;
};

struct PowerRow {
    double h = 0.0;
    std::size_t n = 0;
    double alpha = 0.05;
    std::size_t n_sims = 0;
    std::size_t n_perms = 0;
    double empirical_power = 0.0;
    double mc_se = 0.0;
    double pred_main = 0.0;
    double pred_density_weighted = 0.0;
    std::string matching_variant;  ///< main, density-weighted, both or neither
    double wall_time_s = 0.0;
};

struct PowerStudyResult {
    PowerStudyConfig config;
    std::vector<PowerRow> rows;

    /// Variant that matches at every h != 0, or "neither" / "both".
    [[nodiscard]] std::string overall_match() const;
    /// Variant with the smaller summed |empirical - predicted| over all h.
    [[nodiscard]] std::string closest_variant() const;
    [[nodiscard]] bool monotone() const;
};

inline constexpr std::string_view kPowerCsvHeader =
    "base,rho,h,n,alpha,n_sims,n_perms,empirical_power,mc_se,pred_main,pred_density_weighted,matching_variant,seed,"
    "wall_time_s";

/// Replicate r draws one base series from stream (seed, r) and reuses it for
/// every h, so the curve over h is a paired comparison. All replicates are
/// tested against one tabulated permutation null; the statistic is
/// distribution-free, so this equals the per-replicate null in law.
[[nodiscard]] PowerStudyResult run_power_study(const PowerStudyConfig& config);

void write_power_csv(std::ostream& out, const PowerStudyResult& result);
void write_power_csv(const PowerStudyResult& result, const std::filesystem::path& path);

/// Short human-readable summary naming the matching variant.
[[nodiscard]] std::string power_study_log(const PowerStudyResult& result);

}  // namespace trendperm
