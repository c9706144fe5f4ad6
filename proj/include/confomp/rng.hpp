#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace confomp {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive hash of a tuple of integers; used to derive per-trial
/// seeds that depend only on their coordinates, never on scheduling.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

}  // namespace confomp
