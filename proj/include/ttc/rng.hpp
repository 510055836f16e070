#pragma once

#include <cstdint>
#include <random>

namespace ttc {

/// splitmix64 finalizer; decorrelates per-trajectory seeds derived from one
/// base seed so neighbouring indices do not produce correlated streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

/// Seed for trajectory `index` in a batch with base seed `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix_seed(base + 0x9E3779B97F4A7C15ull * (index + 1));
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace ttc
