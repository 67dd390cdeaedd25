#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace trendperm {

// Counter-based seeding: every random stream in the library is identified by
// a key tuple (master seed, index, index, ...) hashed through the splitmix64
// finalizer. Streams never depend on the order in which they are created, so
// results are identical for any thread count.

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += kGoldenGamma;
    return mix64(state);
}

/// Hash of the key tuple (master, keys...).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master,
                                                  std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(master + kGoldenGamma);
    std::uint64_t i = 1;
    for (std::uint64_t k : keys) {
        h = mix64(h ^ mix64(k + i * kGoldenGamma));
        ++i;
    }
    return h;
}

/// xoshiro256** seeded from splitmix64. Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            word = splitmix64_next(sm);
        }
    }

    /// Stream for key tuple (master, keys...).
    static constexpr Stream keyed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
        return Stream(derive_seed(master, keys));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, range), range >= 1 (Lemire's nearly-divisionless method).
    std::uint64_t bounded(std::uint64_t range) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * range;
        auto low = static_cast<std::uint64_t>(m);
        if (low < range) {
            const std::uint64_t threshold = (0 - range) % range;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * range;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace trendperm
