#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace stackgame {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for (master, purpose, index): FNV-1a over the purpose tag,
/// then splitmix64 over master, tag hash and index in turn.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                                 std::uint64_t index = 0) {
  std::uint64_t tag = 0xcbf29ce484222325ULL;
  for (unsigned char ch : purpose) {
    tag ^= ch;
    tag *= 0x100000001b3ULL;
  }
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ tag);
  return splitmix64(h ^ index);
}

inline std::mt19937_64 make_stream(std::uint64_t master,
                                   std::string_view purpose,
                                   std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(master, purpose, index));
}

/// Uniform double in [lo, hi) from the top 53 bits; independent of the
/// standard library's distribution implementation.
inline double uniform(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

}  // namespace stackgame
