#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chainbk {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stream seed for one firm. Keyed by id rather than index so results do not
/// depend on the order firms were listed in.
inline std::uint64_t firm_seed(std::uint64_t seed, std::string_view firm_id,
                               std::uint64_t stream = 0) {
  return splitmix64(splitmix64(seed ^ fnv1a(firm_id)) + stream);
}

}  // namespace chainbk
