#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kcq::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a stream key from a master seed and a tuple of counters. The
/// result depends only on the values, never on call order, so parallel
/// workers can draw from independent streams deterministically.
inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept {
  std::uint64_t h = mix(seed);
  for (auto c : counters) h = mix(h ^ mix(c + 0x632be59bd9b4e019ULL));
  return h;
}

/// Engine for one keyed stream.
inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
  return std::mt19937_64(derive(seed, counters));
}

}  // namespace kcq::rng
