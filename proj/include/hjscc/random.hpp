#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace hjscc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; gives independent-looking substream seeds for
// (seed, stream) pairs so that restarts and trials can run in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Inverse-CDF draw from a probability row. Falls back to the last
// positive-mass symbol when rounding leaves the cumulative sum short of u.
inline std::size_t draw_index(std::span<const double> probs, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

}  // namespace hjscc
