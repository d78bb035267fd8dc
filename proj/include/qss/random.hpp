// random.hpp
// Seeded deterministic randomness. Every stochastic operation takes an
// explicit RandomSource so transcripts are reproducible.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qss {

using RandomSource = std::mt19937_64;

// Uniform draw in {0,...,n-1} by rejection; avoids the
// implementation-defined mapping of std::uniform_int_distribution.
inline int uniform_below(RandomSource& rng, int n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % (std::uint64_t)n;
    std::uint64_t r;
    do { r = rng(); } while (r >= limit);
    return (int)(r % (std::uint64_t)n);
}

// Uniform double in [0,1) with 53 bits.
inline double uniform_unit(RandomSource& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates permutation of {0,...,n-1}.
inline std::vector<int> random_permutation(RandomSource& rng, int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
        int k = uniform_below(rng, i + 1);
        std::swap(p[i], p[k]);
    }
    return p;
}

}  // namespace qss
