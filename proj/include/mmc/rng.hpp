#pragma once

// Portable random draws. The standard distributions are implementation
// defined, so sampling goes through these helpers to keep trajectory files
// bit-identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace mmc::rng {

using Engine = std::mt19937_64;

/// Independent engine for sub-stream `key` of `seed`.
inline Engine substream(std::uint64_t seed, std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    0x6d6d63u};
  return Engine(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection sampled.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

/// Standard exponential, i.e. Gamma(1).
inline double exponential(Engine& eng) { return -std::log1p(-uniform01(eng)); }

}  // namespace mmc::rng
