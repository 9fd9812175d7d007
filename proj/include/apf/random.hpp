#pragma once

#include <cstdint>
#include <random>

namespace apf {

// std:: distributions are implementation-defined; these keep seeded streams
// identical across standard libraries.
using Rng = std::mt19937_64;

[[nodiscard]] inline double unit_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n).
[[nodiscard]] inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return x % n;
}

}  // namespace apf
