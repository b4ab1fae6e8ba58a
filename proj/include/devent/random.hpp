#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string_view>

namespace devent {

// splitmix64 finalizer; decorrelates sequential seeds before they feed mt19937_64
inline std::uint64_t mix_bits(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a base seed and a string tag
/// (e.g. a session id). FNV-1a over the tag, then splitmix finalize.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 14695981039346656037ULL ^ seed;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return mix_bits(h);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix_bits(seed ^ mix_bits(a ^ mix_bits(b)));
}

/// Deterministic RNG stream. One instance per logical purpose; never shared
/// across purposes, so adding draws in one place cannot shift another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_bits(seed)) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean, double sd) {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }

    /// Inclusive integer range.
    std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }

    template <class It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace devent
