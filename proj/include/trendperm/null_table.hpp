#pragma once

#include "trendperm/permutation.hpp"
#include "trendperm/statistic.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>

namespace trendperm {

inline constexpr int kNullTableFormatVersion = 1;

/// Identifies a tabulated permutation null. Every statistic here is a rank
/// statistic, so the null only depends on these fields and never on the data.
/// `permutations == 0` requests exact enumeration.
struct NullKey {
    StatisticKind kind = StatisticKind::GlobalStudentized;
    std::size_t n = 0;
    std::size_t bandwidth = 0;  ///< effective bandwidth; 0 for unstudentized kinds
    std::size_t order = 0;      ///< local order; 0 for global kinds
    double floor = kDefaultVarianceFloor;
    std::size_t permutations = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] auto tie() const { return std::tie(kind, n, bandwidth, order, floor, permutations, seed); }
    friend bool operator<(const NullKey& a, const NullKey& b) { return a.tie() < b.tie(); }
    friend bool operator==(const NullKey& a, const NullKey& b) { return a.tie() == b.tie(); }
};

/// Canonical key for a statistic and sampling plan; fills in the default
/// bandwidth and zeroes fields the kind ignores.
[[nodiscard]] NullKey make_null_key(const StatisticParams& params, std::size_t n, std::size_t permutations,
                                    std::uint64_t seed);

[[nodiscard]] StatisticParams params_of(const NullKey& key);

/// Computes the null on the identity arrangement (1..n).
[[nodiscard]] PermutationDistribution compute_null(const NullKey& key,
                                                   std::size_t enumeration_limit = kDefaultEnumerationLimit);

/// Thread-safe: concurrent lookups, serialized insertion.
class NullTableCache {
public:
    [[nodiscard]] std::shared_ptr<const PermutationDistribution> get(const NullKey& key);
    void insert(const NullKey& key, PermutationDistribution dist);
    [[nodiscard]] std::size_t size() const;
    void clear();

    static NullTableCache& global();

private:
    mutable std::shared_mutex mutex_;
    std::map<NullKey, std::shared_ptr<const PermutationDistribution>> entries_;
};

/// Cached null for `key` (computed once, then shared).
[[nodiscard]] std::shared_ptr<const PermutationDistribution> tabulate_null(const NullKey& key,
                                                                           NullTableCache& cache = NullTableCache::global());

/// Versioned text format: a header line "trendperm-null <version>", key=value
/// metadata lines, then one value per line in shortest round-trip form.
void save_null_table(const std::filesystem::path& path, const NullKey& key, const PermutationDistribution& dist);

struct LoadedNullTable {
    NullKey key;
    PermutationDistribution dist;
};

/// Throws ParseError on a malformed file or a version mismatch.
[[nodiscard]] LoadedNullTable load_null_table(const std::filesystem::path& path);

}  // namespace trendperm
