#pragma once

#include <cstdint>
#include <random>

namespace danneal {

// splitmix64 finalizer: a bijective 64-bit mixer with full avalanche, used
// here only to derive seeds, never as the simulation generator itself.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a (trial, stream tag, agent) path into a master seed. Every named
// stream gets statistically independent draws, so toggling one noise source
// on or off never shifts what another source sees.
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::uint64_t trial = 0,
                                           std::uint64_t tag = 0,
                                           std::uint64_t agent = 0) noexcept {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ mix64(trial + 0x243f6a8885a308d3ULL));
    s = mix64(s ^ mix64(tag + 0x13198a2e03707344ULL));
    s = mix64(s ^ mix64(agent + 0xa4093822299f31d0ULL));
    return s;
}

inline std::mt19937_64 substream(std::uint64_t master, std::uint64_t trial = 0,
                                 std::uint64_t tag = 0, std::uint64_t agent = 0) {
    return std::mt19937_64(derive_seed(master, trial, tag, agent));
}

// Stream tags.
inline constexpr std::uint64_t kStreamGraph = 1;         // per-iteration graph draws
inline constexpr std::uint64_t kStreamGradientNoise = 2; // per-agent gradient noise
inline constexpr std::uint64_t kStreamAnnealing = 3;     // per-agent annealing noise
inline constexpr std::uint64_t kStreamChecker = 4;       // sampled assumption checks

}  // namespace danneal
