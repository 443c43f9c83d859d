#pragma once

#include <cstdint>
#include <random>

namespace nnd {

using Rng = std::mt19937_64;

// SplitMix64 finalizer: a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for item `index` of a batch:
//   sub_seed(master, i) = splitmix64(master + 0x9e3779b97f4a7c15 * (i + 1))
// The multiplier is odd, so distinct indices (mod 2^64) give distinct
// arguments, and splitmix64 is a bijection, so sub-seeds never collide
// within one master seed.
constexpr std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Independent stream for a named stage (layout, restart, ...) of one item.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace nnd
