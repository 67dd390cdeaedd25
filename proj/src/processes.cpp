#include "trendperm/processes.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/rng.hpp"
#include "trendperm/text.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

#include <cmath>
#include <string>

namespace trendperm {

std::string_view to_string(InnovationKind k) noexcept {
    switch (k) {
        case InnovationKind::Gaussian: return "gaussian";
        case InnovationKind::Uniform: return "uniform";
        case InnovationKind::StudentT: return "student-t";
    }
    return "unknown";
}

InnovationKind parse_innovation(std::string_view id) {
    if (id == "gaussian" || id == "normal") return InnovationKind::Gaussian;
    if (id == "uniform") return InnovationKind::Uniform;
    if (id == "student-t" || id == "t") return InnovationKind::StudentT;
    throw DomainError("unknown innovation distribution '" + std::string(id) + "'");
}

namespace {

// stream sub-keys
constexpr std::uint64_t kMainStream = 0;
constexpr std::uint64_t kSecondStream = 1;
constexpr std::uint64_t kJitterStream = 2;
constexpr std::uint64_t kTieStream = 3;

class InnovationSampler {
public:
    explicit InnovationSampler(Innovation dist) : dist_(dist), t_(dist.kind == InnovationKind::StudentT ? dist.df : 5.0) {
        if (dist_.kind == InnovationKind::StudentT) {
            if (!(dist_.df > 2.0)) {
                throw DomainError("Student-t innovations need df > 2 for a finite variance");
            }
            t_scale_ = std::sqrt((dist_.df - 2.0) / dist_.df);
        }
    }

    double operator()(Stream& s) {
        switch (dist_.kind) {
            case InnovationKind::Gaussian: return normal_(s);
            case InnovationKind::Uniform: return (2.0 * s.uniform01() - 1.0) * std::sqrt(3.0);
            case InnovationKind::StudentT: return t_(s) * t_scale_;
        }
        return 0.0;
    }

private:
    Innovation dist_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::student_t_distribution<double> t_;
    double t_scale_ = 1.0;
};

TimeSeries finish(std::vector<double> values, std::uint64_t seed) {
    // continuous laws give ties with probability zero; break any that occur
    return TimeSeries(std::move(values), RandomTieBreak{derive_seed(seed, {kTieStream})});
}

void check_length(std::size_t n) {
    if (n < 2) {
        throw DomainError("generated series need n >= 2");
    }
}

void check_rho(double rho) {
    if (!(std::abs(rho) < 1.0)) {
        throw DomainError("autoregressive coefficient must satisfy |rho| < 1");
    }
}

void check_epsilon_open(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("epsilon must lie in (0, 1)");
    }
}

std::vector<double> gaussian_ar1_values(std::size_t n, double rho, Stream& stream) {
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(n);
    if (n == 0) {
        return x;
    }
    x[0] = normal(stream) / std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 1; i < n; ++i) {
        x[i] = rho * x[i - 1] + normal(stream);
    }
    return x;
}

}  // namespace

std::string process_name(const ProcessSpec& spec) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidProcess>) return "iid";
            else if constexpr (std::is_same_v<T, MDepProductProcess>) return "mdep";
            else if constexpr (std::is_same_v<T, Ar1Process>) return "ar1";
            else if constexpr (std::is_same_v<T, Ar2InterleavedProcess>) return "ar2";
            else if constexpr (std::is_same_v<T, Ma2Process>) return "ma2";
            else if constexpr (std::is_same_v<T, MarkovLocalProcess>) return "markov";
            else return "walk";
        },
        spec.kind);
}

TimeSeries gen_iid(std::size_t n, Innovation dist, std::uint64_t seed) {
    check_length(n);
    Stream stream = Stream::keyed(seed, {kMainStream});
    InnovationSampler draw(dist);
    std::vector<double> x(n);
    for (auto& v : x) {
        v = draw(stream);
    }
    return finish(std::move(x), seed);
}

TimeSeries gen_mdep_product(std::size_t n, std::size_t m, std::uint64_t seed) {
    check_length(n);
    Stream stream = Stream::keyed(seed, {kMainStream});
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(n + m);
    for (auto& v : z) {
        v = normal(stream);
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t j = 0; j <= m; ++j) {
            prod *= z[i + j];
        }
        x[i] = prod;
    }
    return finish(std::move(x), seed);
}

TimeSeries gen_ar1(std::size_t n, double rho, std::uint64_t seed, Innovation dist) {
    check_length(n);
    check_rho(rho);
    Stream stream = Stream::keyed(seed, {kMainStream});
    if (dist.kind == InnovationKind::Gaussian) {
        return finish(gaussian_ar1_values(n, rho, stream), seed);
    }
    InnovationSampler draw(dist);
    // stationary start through the MA(infinity) form, truncated once rho^k
    // drops below double precision
    std::size_t terms = 1;
    for (double w = std::abs(rho); w > 1e-17 && terms < 100000; w *= std::abs(rho)) {
        ++terms;
    }
    double x0 = 0.0;
    double w = 1.0;
    for (std::size_t k = 0; k < terms; ++k) {
        x0 += w * draw(stream);
        w *= rho;
    }
    std::vector<double> x(n);
    x[0] = x0;
    for (std::size_t i = 1; i < n; ++i) {
        x[i] = rho * x[i - 1] + draw(stream);
    }
    return finish(std::move(x), seed);
}

TimeSeries gen_ar2_interleaved(std::size_t n, double rho, std::uint64_t seed) {
    check_length(n);
    check_rho(rho);
    Stream odd_stream = Stream::keyed(seed, {kMainStream});
    Stream even_stream = Stream::keyed(seed, {kSecondStream});
    const auto odd = gaussian_ar1_values((n + 1) / 2, rho, odd_stream);
    const auto even = gaussian_ar1_values(n / 2, rho, even_stream);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (i % 2 == 0) ? odd[i / 2] : even[i / 2];
    }
    return finish(std::move(x), seed);
}

TimeSeries gen_ma2(std::size_t n, double phi0, double phi1, std::uint64_t seed, Innovation dist) {
    check_length(n);
    if (!std::isfinite(phi0) || !std::isfinite(phi1) || (phi0 == 0.0 && phi1 == 0.0)) {
        throw DomainError("MA coefficients must be finite and not both zero");
    }
    Stream stream = Stream::keyed(seed, {kMainStream});
    InnovationSampler draw(dist);
    std::vector<double> e(n + 1);
    for (auto& v : e) {
        v = draw(stream);
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = phi0 * e[i + 1] + phi1 * e[i];
    }
    return finish(std::move(x), seed);
}

std::vector<double> markov_local_stationary(std::int64_t half_range, double epsilon) {
    if (half_range < 1) {
        throw DomainError("Markov chain needs M >= 1");
    }
    check_epsilon_open(epsilon);
    const auto states = static_cast<std::size_t>(2 * half_range + 1);
    std::vector<double> pi(states);
    double w = 1.0;
    for (std::size_t k = 0; k + 1 < states; ++k) {
        pi[k] = epsilon * w;
        w *= 1.0 - epsilon;
    }
    pi[states - 1] = w;  // (1-eps)^{2M}
    return pi;
}

std::vector<double> markov_local_geometric_law(std::int64_t half_range, double epsilon) {
    if (half_range < 1) {
        throw DomainError("Markov chain needs M >= 1");
    }
    check_epsilon_open(epsilon);
    const auto states = static_cast<std::size_t>(2 * half_range + 1);
    const double base = epsilon / (1.0 - std::pow(1.0 - epsilon, static_cast<double>(states)));
    std::vector<double> pi(states);
    double w = 1.0;
    for (std::size_t k = 0; k < states; ++k) {
        pi[k] = base * w;
        w *= 1.0 - epsilon;
    }
    return pi;
}

std::vector<std::int64_t> markov_local_states(std::size_t n, std::int64_t half_range, double epsilon,
                                              std::uint64_t seed) {
    const auto pi = markov_local_stationary(half_range, epsilon);
    Stream stream = Stream::keyed(seed, {kMainStream});

    std::vector<std::int64_t> x(n);
    if (n == 0) {
        return x;
    }
    // inverse-CDF draw of the initial state
    const double u = stream.uniform01();
    double cum = 0.0;
    std::size_t k = 0;
    while (k + 1 < pi.size() && cum + pi[k] <= u) {
        cum += pi[k];
        ++k;
    }
    x[0] = static_cast<std::int64_t>(k) - half_range;
    for (std::size_t i = 1; i < n; ++i) {
        if (stream.uniform01() < epsilon) {
            x[i] = -half_range;
        } else {
            x[i] = std::min(x[i - 1] + 1, half_range);
        }
    }
    return x;
}

TimeSeries gen_markov_local(std::size_t n, std::int64_t half_range, double epsilon, std::uint64_t seed, bool jitter) {
    check_length(n);
    const auto states = markov_local_states(n, half_range, epsilon, seed);
    std::vector<double> x(n);
    Stream jitter_stream = Stream::keyed(seed, {kJitterStream});
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(states[i]);
        if (jitter) {
            x[i] += (jitter_stream.uniform01() - 0.5) * 0.5;
        }
    }
    return finish(std::move(x), seed);
}

TimeSeries gen_drift_walk(std::size_t n, double c, double epsilon, std::uint64_t seed) {
    check_length(n);
    if (!(c > 0.0)) {
        throw DomainError("drift walk needs c > 0");
    }
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw DomainError("drift walk needs epsilon in [0, 1)");
    }
    Stream stream = Stream::keyed(seed, {kMainStream});
    std::vector<double> y(n);
    double level = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        level += stream.uniform01() < epsilon ? -c : 1.0;
        y[i] = level;
    }
    return finish(std::move(y), seed);
}

TimeSeries add_linear_drift(const TimeSeries& series, double h) {
    if (!std::isfinite(h)) {
        throw DomainError("drift scale must be finite");
    }
    if (h == 0.0) {
        return series;
    }
    const auto x = series.values();
    const double scale = h / std::pow(static_cast<double>(x.size()), 1.5);
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += scale * static_cast<double>(i + 1);
    }
    return TimeSeries(std::move(y), RandomTieBreak{0});
}

TimeSeries generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    TimeSeries base = std::visit(
        [&](const auto& p) -> TimeSeries {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, IidProcess>) return gen_iid(n, p.dist, seed);
            else if constexpr (std::is_same_v<T, MDepProductProcess>) return gen_mdep_product(n, p.m, seed);
            else if constexpr (std::is_same_v<T, Ar1Process>) return gen_ar1(n, p.rho, seed, p.dist);
            else if constexpr (std::is_same_v<T, Ar2InterleavedProcess>) return gen_ar2_interleaved(n, p.rho, seed);
            else if constexpr (std::is_same_v<T, Ma2Process>) return gen_ma2(n, p.phi0, p.phi1, seed, p.dist);
            else if constexpr (std::is_same_v<T, MarkovLocalProcess>)
                return gen_markov_local(n, p.half_range, p.epsilon, seed, p.jitter);
            else return gen_drift_walk(n, p.c, p.epsilon, seed);
        },
        spec.kind);
    if (spec.drift != 0.0) {
        return add_linear_drift(base, spec.drift);
    }
    return base;
}

}  // namespace trendperm
