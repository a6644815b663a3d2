#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nlpesim/util/error.hpp"

namespace nlpesim {

// splitmix64; used to derive independent substream seeds from (seed, tags).
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Substream seed for a (seed, a, b) triple. Sampling order then never
// depends on loop order or thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b * 0xc2b2ae3d27d4eb4fULL;
    h ^= splitmix64(s);
    return h;
}

inline double uniform01(std::mt19937_64& eng) {
    // 53-bit mantissa; identical across platforms for a given engine state.
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Exact Poisson sampling via multiplication of uniforms, chunked so the
// rejection loop never sees a large mean. Distributions from <random> are
// implementation-defined sequences; this keeps outputs byte-stable.
inline long long poisson_knuth(std::mt19937_64& eng, double mean) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(eng);
    } while (p > limit);
    return k - 1;
}

inline long long sample_poisson(std::mt19937_64& eng, double mean) {
    if (!(mean >= 0.0))
        throw input_error("rng: Poisson mean must be non-negative");
    if (mean == 0.0)
        return 0;
    long long total = 0;
    while (mean > 25.0) {
        total += poisson_knuth(eng, 25.0);
        mean -= 25.0;
    }
    return total + poisson_knuth(eng, mean);
}

} // namespace nlpesim
