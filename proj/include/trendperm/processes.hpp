#pragma once

#include "trendperm/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace trendperm {

// =============================================================================
// Innovation laws (all centred with unit variance)
// =============================================================================

enum class InnovationKind { Gaussian, Uniform, StudentT };

struct Innovation {
    InnovationKind kind = InnovationKind::Gaussian;
    double df = 5.0;  ///< Student-t degrees of freedom, > 2

    [[nodiscard]] static Innovation gaussian() { return {}; }
    [[nodiscard]] static Innovation uniform() { return {InnovationKind::Uniform, 0.0}; }
    [[nodiscard]] static Innovation student_t(double df) { return {InnovationKind::StudentT, df}; }
};

[[nodiscard]] std::string_view to_string(InnovationKind k) noexcept;
[[nodiscard]] InnovationKind parse_innovation(std::string_view id);

// =============================================================================
// Process specifications
// =============================================================================

struct IidProcess {
    Innovation dist;
};

/// X_i = prod_{j=0}^{m} Z_{i+j}: m+1 Gaussian factors, m-dependent; m = 0 is i.i.d.
struct MDepProductProcess {
    std::size_t m = 0;
};

/// Stationary AR(1), X_1 drawn from the stationary law.
struct Ar1Process {
    double rho = 0.0;
    Innovation dist;
};

/// Two independent stationary Gaussian AR(1) streams at odd/even indices.
struct Ar2InterleavedProcess {
    double rho = 0.0;
};

/// X_i = phi0 e_i + phi1 e_{i-1}.
struct Ma2Process {
    double phi0 = 1.0;
    double phi1 = 0.0;
    Innovation dist;
};

/// Chain on {-M..M}: up one step w.p. 1-eps (stay at M), reset to -M w.p. eps.
struct MarkovLocalProcess {
    std::int64_t half_range = 1;
    double epsilon = 0.1;
    bool jitter = true;  ///< add seeded U(-1/4, 1/4) jitter; otherwise ties are broken in rank
};

/// Y_0 = 0, Y_i = Y_{i-1} + (1 w.p. 1-eps, -c w.p. eps). Not stationary.
struct DriftWalkProcess {
    double c = 1.0;
    double epsilon = 0.1;
};

using ProcessKind = std::variant<IidProcess, MDepProductProcess, Ar1Process, Ar2InterleavedProcess, Ma2Process,
                                 MarkovLocalProcess, DriftWalkProcess>;

/// A process plus an optional linear drift h i / n^{3/2} added afterwards.
struct ProcessSpec {
    ProcessKind kind = IidProcess{};
    double drift = 0.0;
};

[[nodiscard]] std::string process_name(const ProcessSpec& spec);

// =============================================================================
// Generators. All are deterministic functions of (parameters, n, seed).
// =============================================================================

[[nodiscard]] TimeSeries gen_iid(std::size_t n, Innovation dist, std::uint64_t seed);
[[nodiscard]] TimeSeries gen_mdep_product(std::size_t n, std::size_t m, std::uint64_t seed);
/// Throws DomainError unless |rho| < 1.
[[nodiscard]] TimeSeries gen_ar1(std::size_t n, double rho, std::uint64_t seed, Innovation dist = {});
[[nodiscard]] TimeSeries gen_ar2_interleaved(std::size_t n, double rho, std::uint64_t seed);
[[nodiscard]] TimeSeries gen_ma2(std::size_t n, double phi0, double phi1, std::uint64_t seed, Innovation dist = {});
[[nodiscard]] TimeSeries gen_markov_local(std::size_t n, std::int64_t half_range, double epsilon, std::uint64_t seed,
                                          bool jitter = true);
[[nodiscard]] TimeSeries gen_drift_walk(std::size_t n, double c, double epsilon, std::uint64_t seed);

[[nodiscard]] TimeSeries generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

/// Y_i = X_i + h i / n^{3/2}.
[[nodiscard]] TimeSeries add_linear_drift(const TimeSeries& series, double h);

/// Raw integer path of the Markov chain (states, no jitter).
[[nodiscard]] std::vector<std::int64_t> markov_local_states(std::size_t n, std::int64_t half_range, double epsilon,
                                                            std::uint64_t seed);

/// Stationary law of the chain's transition matrix, indexed by state + M:
/// pi_{-M} = eps, pi_i = eps (1-eps)^{i+M} for i < M, pi_M = (1-eps)^{2M}.
[[nodiscard]] std::vector<double> markov_local_stationary(std::int64_t half_range, double epsilon);

/// The truncated-geometric law pi_i = pi_{-M} (1-eps)^{i+M},
/// pi_{-M} = eps / (1 - (1-eps)^{2M+1}). Agrees with the stationary law up to
/// O((1-eps)^{2M}).
[[nodiscard]] std::vector<double> markov_local_geometric_law(std::int64_t half_range, double epsilon);

}  // namespace trendperm
