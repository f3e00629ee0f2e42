#pragma once

#include <cstdint>
#include <string_view>

// Hand-rolled SplitMix64 generator. std::shuffle / std::uniform_*_distribution
// sequences are implementation-defined, which would break the byte-identical
// rerun guarantees, so all seeded randomness in the toolkit goes through this.

namespace uncal {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return hash64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// FNV-1a over bytes.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Generator keyed by (seed, domain tag, string key, index). Used wherever a
/// per-record draw must be independent of scheduling and request order.
inline Rng keyed_rng(std::uint64_t seed, std::string_view tag,
                     std::string_view key = {}, std::uint64_t index = 0) {
    std::uint64_t h = hash_combine(seed, hash_str(tag));
    h = hash_combine(h, hash_str(key));
    h = hash_combine(h, index);
    return Rng(h);
}

}  // namespace uncal
