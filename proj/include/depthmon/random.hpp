#pragma once

#include <cstdint>
#include <random>

namespace depthmon {

using Rng = std::mt19937_64;

/// Independent generator for replicate `stream` of a run seeded with `seed`.
/// Replicates can be evaluated in any order (or concurrently) with identical results.
inline Rng make_substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9U};
    return Rng(seq);
}

}  // namespace depthmon
