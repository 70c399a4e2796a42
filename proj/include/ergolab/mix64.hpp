#pragma once
// The 64-bit keyed mixer behind every deterministic sample. The exact
// constant sequence below is part of the output format: runs must reproduce
// bit-for-bit across machines and implementations.
//
//   mix(z): z += 0x9E3779B97F4A7C15
//           z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//           z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//           return z ^ (z >> 31)
//
// Point seeds are mix(master_seed ^ mix(stream_id)). A lattice coordinate is
// absorbed as both 64-bit halves of its 128-bit two's-complement value.

#include <cstdint>

#include "ergolab/int128.hpp"

namespace ergolab {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t low_half(i128 v) { return static_cast<std::uint64_t>(static_cast<u128>(v)); }
inline std::uint64_t high_half(i128 v) { return static_cast<std::uint64_t>(static_cast<u128>(v) >> 64); }

inline std::uint64_t point_seed_for(std::uint64_t master_seed, std::uint64_t stream_id) {
  return mix64(master_seed ^ mix64(stream_id));
}

inline std::uint64_t absorb_coordinate(std::uint64_t h, i128 c) {
  h = mix64(h ^ low_half(c));
  h = mix64(h ^ high_half(c));
  return h;
}

}  // namespace ergolab
