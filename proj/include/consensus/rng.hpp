#pragma once

#include <cstdint>
#include <random>

namespace consensus {

using Rng = std::mt19937_64;

/// Seed for an independent stream keyed by (base, stream), via splitmix64
/// finalisation of both words.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(base) ^ (stream + 0x632be59bd9b4e019ULL));
}

}  // namespace consensus
