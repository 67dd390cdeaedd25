#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace trendperm {

// -----------------------------------------------------------------------------
// Standard normal
// -----------------------------------------------------------------------------

[[nodiscard]] double normal_cdf(double x);
/// 1 - Phi(x) without cancellation in the upper tail.
[[nodiscard]] double normal_sf(double x);
/// Phi^{-1}(p), p in (0, 1).
[[nodiscard]] double normal_quantile(double p);

// -----------------------------------------------------------------------------
// Drift and limiting variance
// -----------------------------------------------------------------------------

/// nu_n = n^{-1/2} sum_i (n + 1 - 2i)/(n - 1) mu_i
[[nodiscard]] double nu_n(std::span<const double> mu);

/// The drift term with the marginal-density factor: 4 E[f(X_1)] nu_n.
[[nodiscard]] double nu_n_density_weighted(std::span<const double> mu, double mean_density);

/// E[f(X)] = integral of f^2 for X ~ N(0, sd^2): 1 / (2 sqrt(pi) sd).
[[nodiscard]] double gaussian_mean_density(double sd = 1.0);

/// The linear drift mu_i = h i / n^{3/2}, i = 1..n.
[[nodiscard]] std::vector<double> linear_drift(std::size_t n, double h);

/// sigma^2 = 4/9 + (8/3) sum_k cov[k], cov[k] = Cov(V_1, V_{1+k}), k = 1..K.
[[nodiscard]] double sigma_sq_from_autocov(std::span<const double> cov);

/// Cov(1 - 2F(X_1), 1 - 2F(X_{1+k})) for a stationary Gaussian AR(1):
/// (2/pi) asin(rho^k / 2), k = 1..lags.
[[nodiscard]] std::vector<double> gaussian_ar1_rank_autocov(double rho, std::size_t lags);

/// sigma^2 for a stationary Gaussian AR(1), summing lags until they vanish.
[[nodiscard]] double gaussian_ar1_sigma_sq(double rho);

// -----------------------------------------------------------------------------
// Local power
// -----------------------------------------------------------------------------

struct PowerPrediction {
    double alpha = 0.05;
    double h = 0.0;
    double sigma = 2.0 / 3.0;
    double power = 0.05;
};

/// 1 - Phi(z_{1-alpha} + nu / sigma) for a limiting drift term nu.
[[nodiscard]] PowerPrediction limiting_power(double nu, double sigma, double alpha, double h = 0.0);

/// White noise with drift h i / n^{3/2}: 1 - Phi(z_{1-alpha} - h/4).
[[nodiscard]] PowerPrediction limiting_power_whitenoise(double h, double alpha);

/// Same drift with the density factor, so nu -> -h / (3 sqrt(pi)):
/// 1 - Phi(z_{1-alpha} - h / (2 sqrt(pi))).
[[nodiscard]] PowerPrediction limiting_power_whitenoise_density_weighted(double h, double alpha);

/// AR(1): 1 - Phi(z_{1-alpha} - h / (6 sigma)).
[[nodiscard]] PowerPrediction limiting_power_ar1(double h, double alpha, double sigma);

/// AR(1) with the density factor for marginal sd `marginal_sd`:
/// 1 - Phi(z_{1-alpha} - 4 E[f] h / (6 sigma)).
[[nodiscard]] PowerPrediction limiting_power_ar1_density_weighted(double h, double alpha, double sigma,
                                                                  double marginal_sd);

// -----------------------------------------------------------------------------
// Local statistic, exact i.i.d. moments
// -----------------------------------------------------------------------------

/// Var(sum_i Y_i) under a uniformly random arrangement:
/// n g / 3 + g (4 g^2 + 3 g - 1) / 18. Throws DomainError unless g >= 1 and n >= 2g + 1.
[[nodiscard]] double local_exact_variance(std::size_t n, std::size_t g);

}  // namespace trendperm
