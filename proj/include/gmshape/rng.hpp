#pragma once

#include <cstdint>

namespace gmshape {

// Counter-based random number generation.
//
// Draw number c of stream `seed` is mix64(seed + (c+1)*GAMMA), the SplitMix64
// output function with the Weyl increment GAMMA = 0x9E3779B97F4A7C15. Every
// draw is a pure function of (seed, counter), so any sub-range of a stream can
// be generated independently: chunked sampling reproduces the single-threaded
// sequence bit for bit.

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t rng_at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
}

/// Uniform draw in the open interval (0,1): top 53 bits plus a half-ulp
/// offset, so neither endpoint can occur.
inline double uniform01_at(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(rng_at(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse CDF of the standard normal (Wichura's PPND16 / AS 241 algorithm,
/// accurate to ~1e-16 relative). Deterministic, so Gaussian draws are
/// reproducible across runs of this implementation.
double normal_quantile(double p);

/// Standard normal draw via inverse CDF applied to uniform01_at.
inline double normal01_at(std::uint64_t seed, std::uint64_t counter) {
    return normal_quantile(uniform01_at(seed, counter));
}

}  // namespace gmshape
