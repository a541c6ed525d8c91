#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cellless {

// Engine behind every stochastic draw in the simulator.
using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the tag bytes.
inline constexpr std::uint64_t tag_hash(std::string_view tag) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed of the sub-stream named by (master seed, purpose tag, index).
///
/// Every random quantity in an experiment is drawn from its own sub-stream,
/// so a snapshot's contents never depend on which worker produced it or in
/// what order snapshots were visited.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                           std::uint64_t index) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ tag_hash(tag));
  return splitmix64(s ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Engine make_stream(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  const std::uint64_t s = derive_seed(master, tag, index);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

// 53 random mantissa bits -> [0, 1).
inline constexpr double bits_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class Rng>
double uniform01(Rng& rng) {
  static_assert(Rng::min() == 0 && Rng::max() == UINT64_MAX, "expects a full 64-bit engine");
  return bits_to_unit(rng());
}

}  // namespace cellless
