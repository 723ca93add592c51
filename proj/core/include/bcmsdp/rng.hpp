#pragma once

#include <cstdint>
#include <random>

namespace bcmsdp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent substreams from a seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

/// Deterministic stream `stream` of `seed`, independent of evaluation order.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
  return Rng(mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL)));
}

}  // namespace bcmsdp
