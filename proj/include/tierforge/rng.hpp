#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tierforge {

// Stateless counter-based generator: every draw is a pure function of
// (seed, counter), so parallel callers get identical streams regardless of
// evaluation order.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash(std::uint64_t seed, std::uint64_t counter) {
    return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + counter);
}

// Derives an independent stream seed, used to split per-scene / per-frame.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(hash(seed, stream) ^ 0xBB67AE8584CAA73BULL);
}

inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53; // [0,1)
}

inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    return to_unit(hash(seed, counter));
}

inline double uniform_range(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform(seed, counter);
}

// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
inline double normal(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = 1.0 - to_unit(hash(seed, 2 * counter));     // (0,1]
    const double u2 = to_unit(hash(seed, 2 * counter + 1));       // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace rng
} // namespace tierforge
