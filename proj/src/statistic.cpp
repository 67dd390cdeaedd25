#include "trendperm/statistic.hpp"

#include "trendperm/errors.hpp"

#include <cmath>
#include <string>

namespace trendperm {

std::string_view to_string(StatisticKind kind) noexcept {
    switch (kind) {
        case StatisticKind::GlobalUnstudentized: return "global-unstud";
        case StatisticKind::GlobalStudentized: return "global-stud";
        case StatisticKind::LocalUnstudentized: return "local-unstud";
        case StatisticKind::LocalStudentized: return "local-stud";
    }
    return "unknown";
}

StatisticKind parse_statistic_kind(std::string_view id) {
    for (auto k : {StatisticKind::GlobalUnstudentized, StatisticKind::GlobalStudentized,
                   StatisticKind::LocalUnstudentized, StatisticKind::LocalStudentized}) {
        if (id == to_string(k)) {
            return k;
        }
    }
    throw DomainError("unknown statistic kind '" + std::string(id) + "'");
}

RankStatistic::RankStatistic(StatisticParams params, std::size_t n) : params_(params), n_(n) {
    if (n_ < 2) {
        throw DomainError("rank statistic needs n >= 2");
    }
    if (is_local(params_.kind) && (params_.order < 1 || params_.order > n_ - 1)) {
        throw DomainError("local order must lie in [1, n-1]; got " + std::to_string(params_.order));
    }
    if (is_studentized(params_.kind)) {
        bandwidth_ = params_.bandwidth ? effective_bandwidth(*params_.bandwidth, n_) : bandwidth_default(n_);
        if (!(params_.floor > 0.0)) {
            throw DomainError("variance floor must be positive");
        }
    }
}

std::optional<std::size_t> RankStatistic::bandwidth() const noexcept {
    if (is_studentized(params_.kind)) {
        return bandwidth_;
    }
    return std::nullopt;
}

double RankStatistic::operator()(std::span<const Rank> ranks) const {
    std::optional<VarianceEstimate> unused;
    return evaluate(ranks, unused);
}

double RankStatistic::evaluate(std::span<const Rank> ranks, std::optional<VarianceEstimate>& studentizer) const {
    const double nd = static_cast<double>(n_);
    switch (params_.kind) {
        case StatisticKind::GlobalUnstudentized: {
            const auto s = concordance_sum(ranks, merge_scratch_);
            return std::sqrt(nd) * static_cast<double>(s) / static_cast<double>(pair_count(n_));
        }
        case StatisticKind::GlobalStudentized: {
            const auto s = concordance_sum(ranks, merge_scratch_);
            const double u = static_cast<double>(s) / static_cast<double>(pair_count(n_));
            studentizer = global_variance_from_ranks(ranks, bandwidth_, params_.floor);
            return studentize_global(u, *studentizer, n_);
        }
        case StatisticKind::LocalUnstudentized: {
            const double g = static_cast<double>(params_.order);
            const auto s = local_pair_sum(ranks, params_.order);
            return std::sqrt(nd * g) * static_cast<double>(s) / (nd * g);
        }
        case StatisticKind::LocalStudentized: {
            const double g = static_cast<double>(params_.order);
            const auto s = local_pair_sum(ranks, params_.order);
            const double v = static_cast<double>(s) / (nd * g);
            local_increments_into(ranks, params_.order, increments_);
            studentizer = local_variance_from_increments(increments_, params_.order, bandwidth_, params_.floor);
            return studentize_local(v, *studentizer, n_, params_.order);
        }
    }
    return 0.0;
}

}  // namespace trendperm
