#include "trendperm/variance.hpp"

#include "trendperm/errors.hpp"

#include <cmath>
#include <string>

namespace trendperm {

namespace {

using Wide = __int128;

VarianceEstimate apply_floor(double raw, std::size_t bandwidth, double floor) {
    if (!(floor > 0.0)) {
        throw DomainError("variance floor must be positive");
    }
    VarianceEstimate est;
    est.raw_value = raw;
    est.bandwidth = bandwidth;
    est.floored = raw < floor;
    est.value = est.floored ? floor : raw;
    return est;
}

}  // namespace

std::size_t bandwidth_default(std::size_t n) {
    if (n < 2) {
        throw DomainError("bandwidth_default needs n >= 2");
    }
    auto b = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
    // cbrt can land one off on exact cubes
    while ((b + 1) * (b + 1) * (b + 1) <= n) {
        ++b;
    }
    while (b > 0 && b * b * b > n) {
        --b;
    }
    if (b < 1) {
        b = 1;
    }
    return b > n - 1 ? n - 1 : b;
}

std::size_t effective_bandwidth(std::size_t requested, std::size_t n) {
    if (requested == 0) {
        throw DomainError("bandwidth must be at least 1");
    }
    return requested > n - 1 ? n - 1 : requested;
}

VarianceEstimate global_variance(const TimeSeries& series, std::size_t bandwidth, double floor) {
    return global_variance_from_ranks(series.ranks().view(), bandwidth, floor);
}

VarianceEstimate global_variance_from_ranks(std::span<const Rank> ranks, std::size_t bandwidth, double floor) {
    const std::size_t n = ranks.size();
    if (n < 2) {
        throw DomainError("global_variance needs n >= 2");
    }
    const std::size_t b = effective_bandwidth(bandwidth, n);

    // 1 - 2 r/n = c / n with integer c = n - 2r
    const auto ni = static_cast<std::int64_t>(n);
    thread_local std::vector<std::int64_t> c;
    c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = ni - 2 * static_cast<std::int64_t>(ranks[i]);
    }
    Wide total = 0;
    for (std::size_t k = 1; k <= b; ++k) {
        Wide lag = 0;
        for (std::size_t j = 0; j + k < n; ++j) {
            lag += c[j] * c[j + k];
        }
        total += lag;
    }
    const double nd = static_cast<double>(n);
    const double raw = 4.0 / 9.0 + 8.0 * static_cast<double>(total) / (3.0 * nd * nd * nd);
    return apply_floor(raw, b, floor);
}

VarianceEstimate local_variance(const LocalIncrements& y, std::size_t bandwidth, double floor) {
    return local_variance_from_increments(y.y, y.window, bandwidth, floor);
}

VarianceEstimate local_variance_from_increments(std::span<const std::int64_t> y, std::size_t window,
                                                std::size_t bandwidth, double floor) {
    const std::size_t n = y.size();
    if (n < 2) {
        throw DomainError("local_variance needs n >= 2");
    }
    if (window < 1) {
        throw DomainError("local window must be at least 1");
    }
    const std::size_t b = effective_bandwidth(bandwidth, n);
    const auto ni = static_cast<std::int64_t>(n);

    // Y_i - mean = d_i / n with d_i = n Y_i - T
    std::int64_t total = 0;
    for (std::int64_t v : y) {
        total += v;
    }
    thread_local std::vector<std::int64_t> d;
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = ni * y[i] - total;
    }
    Wide acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<Wide>(d[i]) * d[i];
    }
    Wide cross = 0;
    for (std::size_t j = 1; j <= b; ++j) {
        for (std::size_t i = 0; i + j < n; ++i) {
            cross += static_cast<Wide>(d[i]) * d[i + j];
        }
    }
    acc += 2 * cross;
    const double nd = static_cast<double>(n);
    const double sigma_sq = static_cast<double>(acc) / (nd * nd * nd);
    return apply_floor(sigma_sq / static_cast<double>(window), b, floor);
}

double studentize_global(double u, const VarianceEstimate& var, std::size_t n) {
    if (!(var.value > 0.0)) {
        throw DomainError("studentizer must be positive");
    }
    return std::sqrt(static_cast<double>(n)) * u / std::sqrt(var.value);
}

double studentize_local(double v, const VarianceEstimate& var, std::size_t n, std::size_t window) {
    if (!(var.value > 0.0)) {
        throw DomainError("studentizer must be positive");
    }
    return std::sqrt(static_cast<double>(n) * static_cast<double>(window)) * v / std::sqrt(var.value);
}

}  // namespace trendperm
