#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace feat::rng {

/// splitmix64 finalizer; stateless avalanche of a 64-bit word.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-(axis value, draw) instance seed. Pure function of its inputs, so
/// draws can be generated in any order and still match byte for byte.
inline std::uint64_t derive_seed(std::uint64_t master, double axis_value,
                                 std::uint64_t draw) {
  return mix(mix(master) ^ mix(std::bit_cast<std::uint64_t>(axis_value)) ^
             mix(draw));
}

/// Uniform in [0, 1) with 53 random bits. The standard distributions are
/// implementation-defined, so the mapping is done by hand to keep output
/// identical across toolchains.
inline double uniform01(std::mt19937_64& eng) {
  return double(eng() >> 11) * 0x1.0p-53;
}

/// Unit-mean exponential draw (Rayleigh-squared fading gain).
inline double unit_exponential(std::mt19937_64& eng) {
  return -std::log1p(-uniform01(eng));
}

}  // namespace feat::rng
