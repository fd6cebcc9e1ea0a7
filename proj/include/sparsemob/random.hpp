#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sparsemob {

// All randomness descends from one root seed through derive_seed, so every
// stream is a pure function of (root, tag, index) regardless of thread layout.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sparsemob
