#include "trendperm/null_table.hpp"

#include "trendperm/errors.hpp"
#include "trendperm/text.hpp"

#include <fstream>
#include <mutex>
#include <string>

namespace trendperm {

NullKey make_null_key(const StatisticParams& params, std::size_t n, std::size_t permutations, std::uint64_t seed) {
    const RankStatistic stat(params, n);  // validates
    NullKey key;
    key.kind = params.kind;
    key.n = n;
    key.bandwidth = stat.bandwidth().value_or(0);
    key.order = is_local(params.kind) ? params.order : 0;
    key.floor = is_studentized(params.kind) ? params.floor : 0.0;
    key.permutations = permutations;
    key.seed = permutations == 0 ? 0 : seed;
    return key;
}

StatisticParams params_of(const NullKey& key) {
    StatisticParams p;
    p.kind = key.kind;
    p.order = key.order == 0 ? 1 : key.order;
    if (key.bandwidth > 0) {
        p.bandwidth = key.bandwidth;
    }
    if (key.floor > 0.0) {
        p.floor = key.floor;
    }
    return p;
}

PermutationDistribution compute_null(const NullKey& key, std::size_t enumeration_limit) {
    const RankStatistic stat(params_of(key), key.n);
    if (key.permutations == 0) {
        return exact_permutation_distribution(key.n, stat, enumeration_limit);
    }
    const RankVector identity = RankVector::identity(key.n);
    return permutation_distribution(
        identity.view(), [&](std::span<const Rank> r) { return stat(r); }, std::string(to_string(key.kind)),
        key.permutations, key.seed, stat.bandwidth());
}

// -----------------------------------------------------------------------------
// Cache
// -----------------------------------------------------------------------------

std::shared_ptr<const PermutationDistribution> NullTableCache::get(const NullKey& key) {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : it->second;
}

void NullTableCache::insert(const NullKey& key, PermutationDistribution dist) {
    std::unique_lock lock(mutex_);
    entries_.try_emplace(key, std::make_shared<const PermutationDistribution>(std::move(dist)));
}

std::size_t NullTableCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void NullTableCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

NullTableCache& NullTableCache::global() {
    static NullTableCache cache;
    return cache;
}

std::shared_ptr<const PermutationDistribution> tabulate_null(const NullKey& key, NullTableCache& cache) {
    if (auto hit = cache.get(key)) {
        return hit;
    }
    // Two threads may both compute the same key; the result is deterministic
    // and the first insertion wins, so callers always see one object.
    cache.insert(key, compute_null(key));
    return cache.get(key);
}

// -----------------------------------------------------------------------------
// Persistence
// -----------------------------------------------------------------------------

void save_null_table(const std::filesystem::path& path, const NullKey& key, const PermutationDistribution& dist) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << "trendperm-null " << kNullTableFormatVersion << '\n';
    out << "kind=" << to_string(key.kind) << '\n';
    out << "n=" << key.n << '\n';
    out << "bandwidth=" << key.bandwidth << '\n';
    out << "order=" << key.order << '\n';
    out << "floor=" << text::format_double(key.floor) << '\n';
    out << "permutations=" << key.permutations << '\n';
    out << "seed=" << key.seed << '\n';
    out << "count=" << dist.values.size() << '\n';
    out << "values\n";
    for (double v : dist.values) {
        out << text::format_double(v) << '\n';
    }
    if (!out) {
        throw std::runtime_error("write to '" + path.string() + "' failed");
    }
}

LoadedNullTable load_null_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> std::string_view {
        if (!std::getline(in, line)) {
            throw ParseError("unexpected end of null table", lineno + 1);
        }
        ++lineno;
        return text::trim(line);
    };

    {
        const auto header = text::split(next(), ' ');
        if (header.size() != 2 || header[0] != "trendperm-null") {
            throw ParseError("not a trendperm null table", lineno);
        }
        const auto version = text::parse_uint(header[1]);
        if (!version || *version != static_cast<std::uint64_t>(kNullTableFormatVersion)) {
            throw ParseError("unsupported null table version '" + header[1] + "'", lineno);
        }
    }

    LoadedNullTable table;
    std::size_t count = 0;
    auto field = [&](std::string_view expected) -> std::string {
        const std::string_view l = next();
        const auto eq = l.find('=');
        if (eq == std::string_view::npos || text::trim(l.substr(0, eq)) != expected) {
            throw ParseError("expected '" + std::string(expected) + "=...'", lineno);
        }
        return std::string(text::trim(l.substr(eq + 1)));
    };
    auto uint_field = [&](std::string_view name) {
        const auto v = text::parse_uint(field(name));
        if (!v) {
            throw ParseError("bad integer for '" + std::string(name) + "'", lineno);
        }
        return *v;
    };

    try {
        table.key.kind = parse_statistic_kind(field("kind"));
    } catch (const DomainError& e) {
        throw ParseError(e.what(), lineno);
    }
    table.key.n = uint_field("n");
    table.key.bandwidth = uint_field("bandwidth");
    table.key.order = uint_field("order");
    {
        const auto f = text::parse_double(field("floor"));
        if (!f) {
            throw ParseError("bad value for 'floor'", lineno);
        }
        table.key.floor = *f;
    }
    table.key.permutations = uint_field("permutations");
    table.key.seed = uint_field("seed");
    count = uint_field("count");
    if (next() != "values") {
        throw ParseError("expected 'values'", lineno);
    }

    auto& dist = table.dist;
    dist.statistic_kind = std::string(to_string(table.key.kind));
    dist.n = table.key.n;
    if (table.key.bandwidth > 0) {
        dist.bandwidth = table.key.bandwidth;
    }
    if (table.key.permutations == 0) {
        dist.mode = ExactMode{};
    } else {
        dist.mode = SampledMode{table.key.permutations, table.key.seed};
    }
    dist.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto v = text::parse_double(next());
        if (!v) {
            throw ParseError("bad value", lineno);
        }
        dist.values.push_back(*v);
    }
    return table;
}

}  // namespace trendperm
