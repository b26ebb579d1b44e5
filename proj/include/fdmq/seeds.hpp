#pragma once

#include <cstdint>

namespace fdmq {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-work-item seed: splitmix64(splitmix64(root) ^ splitmix64(index + 1)).
/// Depends only on the root seed and the item index, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 1));
}

/// Seed for a nested item, e.g. (sweep point, repetition).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t outer, std::uint64_t inner) {
  return derive_seed(derive_seed(root, outer), inner);
}

}  // namespace fdmq
