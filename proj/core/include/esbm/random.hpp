#pragma once

#include <cstdint>
#include <random>

namespace esbm {

using Rng = std::mt19937_64;

/// Uniform draw on [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace esbm
