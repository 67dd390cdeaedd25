#include "trendperm/power.hpp"

#include "trendperm/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

namespace trendperm {

namespace {

const boost::math::normal_distribution<double>& standard_normal() {
    static const boost::math::normal_distribution<double> dist(0.0, 1.0);
    return dist;
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0, 1)");
    }
}

}  // namespace

double normal_cdf(double x) { return boost::math::cdf(standard_normal(), x); }

double normal_sf(double x) { return boost::math::cdf(boost::math::complement(standard_normal(), x)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal quantile needs p in (0, 1)");
    }
    return boost::math::quantile(standard_normal(), p);
}

double nu_n(std::span<const double> mu) {
    const std::size_t n = mu.size();
    if (n < 2) {
        throw DomainError("nu_n needs n >= 2");
    }
    const double nd = static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        s += (nd + 1.0 - 2.0 * static_cast<double>(i)) * mu[i - 1];
    }
    return s / ((nd - 1.0) * std::sqrt(nd));
}

double nu_n_density_weighted(std::span<const double> mu, double mean_density) {
    return 4.0 * mean_density * nu_n(mu);
}

double gaussian_mean_density(double sd) {
    if (!(sd > 0.0)) {
        throw DomainError("standard deviation must be positive");
    }
    return 1.0 / (2.0 * std::sqrt(std::numbers::pi) * sd);
}

std::vector<double> linear_drift(std::size_t n, double h) {
    std::vector<double> mu(n);
    const double scale = h / std::pow(static_cast<double>(n), 1.5);
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = scale * static_cast<double>(i + 1);
    }
    return mu;
}

double sigma_sq_from_autocov(std::span<const double> cov) {
    double s = 0.0;
    for (double c : cov) {
        s += c;
    }
    return 4.0 / 9.0 + 8.0 / 3.0 * s;
}

std::vector<double> gaussian_ar1_rank_autocov(double rho, std::size_t lags) {
    if (!(std::abs(rho) < 1.0)) {
        throw DomainError("AR(1) needs |rho| < 1");
    }
    std::vector<double> cov(lags);
    double r = 1.0;
    for (std::size_t k = 0; k < lags; ++k) {
        r *= rho;
        cov[k] = 2.0 / std::numbers::pi * std::asin(r / 2.0);
    }
    return cov;
}

double gaussian_ar1_sigma_sq(double rho) {
    if (!(std::abs(rho) < 1.0)) {
        throw DomainError("AR(1) needs |rho| < 1");
    }
    // |asin(x/2)| <= |x| so the tail after lag K is below |rho|^K / (1 - |rho|)
    std::size_t lags = 1;
    while (lags < 100000 && std::pow(std::abs(rho), static_cast<double>(lags)) / (1.0 - std::abs(rho)) > 1e-17) {
        ++lags;
    }
    const auto cov = gaussian_ar1_rank_autocov(rho, lags);
    return sigma_sq_from_autocov(cov);
}

PowerPrediction limiting_power(double nu, double sigma, double alpha, double h) {
    check_alpha(alpha);
    if (!(sigma > 0.0)) {
        throw DomainError("sigma must be positive");
    }
    PowerPrediction p;
    p.alpha = alpha;
    p.h = h;
    p.sigma = sigma;
    p.power = normal_sf(normal_quantile(1.0 - alpha) + nu / sigma);
    return p;
}

PowerPrediction limiting_power_whitenoise(double h, double alpha) {
    return limiting_power(-h / 6.0, 2.0 / 3.0, alpha, h);
}

PowerPrediction limiting_power_whitenoise_density_weighted(double h, double alpha) {
    return limiting_power(-4.0 * gaussian_mean_density(1.0) * h / 6.0, 2.0 / 3.0, alpha, h);
}

PowerPrediction limiting_power_ar1(double h, double alpha, double sigma) {
    return limiting_power(-h / 6.0, sigma, alpha, h);
}

PowerPrediction limiting_power_ar1_density_weighted(double h, double alpha, double sigma, double marginal_sd) {
    return limiting_power(-4.0 * gaussian_mean_density(marginal_sd) * h / 6.0, sigma, alpha, h);
}

double local_exact_variance(std::size_t n, std::size_t g) {
    if (g < 1 || n < 2 * g + 1) {
        throw DomainError("local_exact_variance needs g >= 1 and n >= 2g + 1");
    }
    const double nd = static_cast<double>(n);
    const double gd = static_cast<double>(g);
    return nd * gd / 3.0 + gd * (4.0 * gd * gd + 3.0 * gd - 1.0) / 18.0;
}

}  // namespace trendperm
