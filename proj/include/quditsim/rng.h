#pragma once

#include <cstdint>
#include <random>

namespace quditsim {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for trial `index` of an experiment seeded with `seed`.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(mix64(seed)), static_cast<std::uint32_t>(mix64(seed) >> 32),
                      static_cast<std::uint32_t>(mix64(index ^ 0x5851f42d4c957f2dULL)),
                      static_cast<std::uint32_t>(mix64(index ^ 0x5851f42d4c957f2dULL) >> 32)};
    return Rng(seq);
}

/// Uniform double in [0, 1) built from the top 53 bits, identical across
/// standard library implementations.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace quditsim
