#pragma once

#include <cstdint>

namespace elastntd {

// Counter-based generator: every draw is a pure function of (seed, stream,
// index), so parallel and serial evaluation orders produce identical values.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    h = splitmix64(h ^ (0xC2B2AE3D27D4EB4FULL * (index + 1)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                      double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, stream, index);
}

}  // namespace elastntd
