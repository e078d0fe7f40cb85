#pragma once

#include <cstdint>
#include <random>

#include "rnet/lattice.hpp"

namespace rnet {

/// Independent seed for sub-stream `stream` of `base` (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

/// Network with i.i.d. resistances uniform in [low, high].
ConductanceMap random_network(const LatticeSpec& spec, double low, double high, Rng& rng);

}  // namespace rnet
