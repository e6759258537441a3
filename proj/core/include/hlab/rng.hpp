#ifndef HLAB_RNG_HPP
#define HLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include "hlab/util.hpp"

namespace hlab {

/// Counter-based random streams. Every draw is a pure function of
/// (seed, sample, slot), so Monte Carlo results are independent of how
/// samples are partitioned across workers.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t sample, std::uint64_t slot) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ sample);
    h = splitmix64(h ^ (slot * 0x9e3779b97f4a7c15ULL));
    return h;
}

/// Uniform in (0, 1), never exactly 0 or 1.
inline double uniform01(std::uint64_t bits) {
    return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard complex Gaussian with density pi^{-1} e^{-|z|^2}: real and
/// imaginary parts are independent N(0, 1/2), so E|g|^2 = 1.
inline cplx complex_gaussian(std::uint64_t seed, std::uint64_t sample, std::uint64_t slot) {
    const double u1 = uniform01(counter_hash(seed, sample, 2 * slot));
    const double u2 = uniform01(counter_hash(seed, sample, 2 * slot + 1));
    const double r = std::sqrt(-std::log(u1));  // |g| has density 2r e^{-r^2}
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

/// Real standard normal N(0,1).
inline double gaussian(std::uint64_t seed, std::uint64_t sample, std::uint64_t slot) {
    const double u1 = uniform01(counter_hash(seed, sample, 2 * slot));
    const double u2 = uniform01(counter_hash(seed, sample, 2 * slot + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng
}  // namespace hlab

#endif
