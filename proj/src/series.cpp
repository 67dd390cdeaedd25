#include "trendperm/series.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace trendperm {

namespace {

void check_order(std::size_t order, std::size_t n, const char* what) {
    if (order < 1 || order > n - 1) {
        throw DomainError(std::string(what) + " must lie in [1, n-1]; got " + std::to_string(order) +
                          " for n = " + std::to_string(n));
    }
}

std::vector<Rank> compute_ranks(std::span<const double> values, const TiePolicy& policy, bool& had_ties) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    had_ties = false;
    for (std::size_t k = 1; k < n; ++k) {
        if (values[order[k]] == values[order[k - 1]]) {
            had_ties = true;
            break;
        }
    }

    if (had_ties) {
        if (std::holds_alternative<RejectTies>(policy)) {
            throw TieError("series contains duplicate values; use random tie-breaking to allow ties");
        }
        // Fisher-Yates within each run of equal values. Run starts are
        // visited in sorted order, so the result only depends on the seed.
        Stream stream(std::get<RandomTieBreak>(policy).seed);
        std::size_t start = 0;
        while (start < n) {
            std::size_t stop = start + 1;
            while (stop < n && values[order[stop]] == values[order[start]]) {
                ++stop;
            }
            for (std::size_t k = stop - start; k > 1; --k) {
                const std::size_t j = start + stream.bounded(k);
                std::swap(order[start + k - 1], order[j]);
            }
            start = stop;
        }
    }

    std::vector<Rank> ranks(n);
    for (std::size_t k = 0; k < n; ++k) {
        ranks[order[k]] = static_cast<Rank>(k + 1);
    }
    return ranks;
}

std::int64_t merge_count(std::span<Rank> a, std::span<Rank> buf) {
    const std::size_t n = a.size();
    if (n < 2) {
        return 0;
    }
    if (n <= 16) {
        // insertion sort; counts the same inversions
        std::int64_t inv = 0;
        for (std::size_t i = 1; i < n; ++i) {
            const Rank key = a[i];
            std::size_t j = i;
            while (j > 0 && a[j - 1] > key) {
                a[j] = a[j - 1];
                --j;
            }
            inv += static_cast<std::int64_t>(i - j);
            a[j] = key;
        }
        return inv;
    }
    const std::size_t mid = n / 2;
    std::int64_t inv = merge_count(a.first(mid), buf.first(mid)) + merge_count(a.subspan(mid), buf.subspan(mid));

    std::size_t i = 0;
    std::size_t j = mid;
    std::size_t k = 0;
    while (i < mid && j < n) {
        if (a[i] <= a[j]) {
            buf[k++] = a[i++];
        } else {
            inv += static_cast<std::int64_t>(mid - i);
            buf[k++] = a[j++];
        }
    }
    while (i < mid) {
        buf[k++] = a[i++];
    }
    while (j < n) {
        buf[k++] = a[j++];
    }
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n), a.begin());
    return inv;
}

}  // namespace

// -----------------------------------------------------------------------------
// RankVector
// -----------------------------------------------------------------------------

RankVector::RankVector(std::vector<Rank> ranks) : ranks_(std::move(ranks)) {
    const std::size_t n = ranks_.size();
    std::vector<bool> seen(n + 1, false);
    for (Rank r : ranks_) {
        if (r < 1 || r > n || seen[r]) {
            throw DomainError("rank vector is not a permutation of 1..n");
        }
        seen[r] = true;
    }
}

RankVector RankVector::identity(std::size_t n) {
    std::vector<Rank> r(n);
    std::iota(r.begin(), r.end(), Rank{1});
    return RankVector(std::move(r));
}

// -----------------------------------------------------------------------------
// TimeSeries
// -----------------------------------------------------------------------------

TimeSeries::TimeSeries(std::vector<double> values, TiePolicy policy)
    : values_(std::move(values)), ranks_(RankVector::identity(0)) {
    if (values_.size() < 2) {
        throw DomainError("a time series needs at least 2 observations; got " + std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("non-finite value at index " + std::to_string(i));
        }
    }
    ranks_ = RankVector(compute_ranks(values_, policy, had_ties_));
}

std::int64_t LocalIncrements::sum() const noexcept {
    return std::accumulate(y.begin(), y.end(), std::int64_t{0});
}

// -----------------------------------------------------------------------------
// Operations
// -----------------------------------------------------------------------------

TimeSeries validate_series(std::span<const double> raw, TiePolicy policy) {
    return TimeSeries(std::vector<double>(raw.begin(), raw.end()), policy);
}

const RankVector& ranks(const TimeSeries& series) noexcept { return series.ranks(); }

std::vector<double> ecdf_at_samples(const TimeSeries& series) {
    const auto n = static_cast<double>(series.size());
    std::vector<double> out;
    out.reserve(series.size());
    for (Rank r : series.ranks().view()) {
        out.push_back(static_cast<double>(r) / n);
    }
    return out;
}

double global_mk(const TimeSeries& series) {
    std::vector<Rank> scratch;
    const std::int64_t s = concordance_sum(series.ranks().view(), scratch);
    return static_cast<double>(s) / static_cast<double>(pair_count(series.size()));
}

std::int64_t pair_sum_bruteforce(const TimeSeries& series) {
    const auto x = series.values();
    const auto r = series.ranks().view();
    std::int64_t s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            // equal values only occur under random tie-breaking; fall back to ranks
            if (x[j] > x[i]) {
                ++s;
            } else if (x[j] < x[i]) {
                --s;
            } else {
                s += r[j] > r[i] ? 1 : -1;
            }
        }
    }
    return s;
}

double local_mk(const TimeSeries& series, std::size_t g) {
    const std::size_t n = series.size();
    check_order(g, n, "local order g");
    const std::int64_t s = local_pair_sum(series.ranks().view(), g);
    return static_cast<double>(s) / (static_cast<double>(n) * static_cast<double>(g));
}

LocalIncrements local_increments(const TimeSeries& series, std::size_t window) {
    check_order(window, series.size(), "local window G");
    LocalIncrements out;
    out.window = window;
    local_increments_into(series.ranks().view(), window, out.y);
    return out;
}

// -----------------------------------------------------------------------------
// Kernels
// -----------------------------------------------------------------------------

std::int64_t count_inversions(std::span<const Rank> ranks, std::vector<Rank>& scratch) {
    const std::size_t n = ranks.size();
    scratch.resize(2 * n);
    std::copy(ranks.begin(), ranks.end(), scratch.begin());
    std::span<Rank> work(scratch.data(), n);
    std::span<Rank> buf(scratch.data() + n, n);
    return merge_count(work, buf);
}

std::int64_t concordance_sum(std::span<const Rank> ranks, std::vector<Rank>& scratch) {
    return pair_count(ranks.size()) - 2 * count_inversions(ranks, scratch);
}

std::int64_t local_pair_sum(std::span<const Rank> ranks, std::size_t g) {
    const std::size_t n = ranks.size();
    std::int64_t s = 0;
    for (std::size_t i = 0; i + g < n; ++i) {
        const Rank ri = ranks[i];
        for (std::size_t j = i + 1; j <= i + g; ++j) {
            s += ranks[j] > ri ? 1 : -1;
        }
    }
    return s;
}

void local_increments_into(std::span<const Rank> ranks, std::size_t window, std::vector<std::int64_t>& out) {
    const std::size_t n = ranks.size();
    out.assign(n, 0);
    for (std::size_t i = 1; i < n; ++i) {
        const Rank ri = ranks[i];
        const std::size_t lo = i > window ? i - window : 0;
        std::int64_t y = 0;
        for (std::size_t j = lo; j < i; ++j) {
            y += ri > ranks[j] ? 1 : -1;
        }
        out[i] = y;
    }
}

}  // namespace trendperm
