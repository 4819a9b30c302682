#pragma once

// Deterministic per-trajectory random streams. A stream is fully determined
// by (base seed, trajectory index, stream id), independent of which worker
// runs it or in which order.

#include <cstdint>
#include <random>

namespace qhe {

enum class NoiseStream : std::uint32_t
{
    Hot = 1,
    Cold = 2,
};

inline std::mt19937_64 make_stream(std::uint64_t base_seed, std::uint64_t index,
                                   NoiseStream stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed),
                      static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace qhe
