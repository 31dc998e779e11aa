#pragma once

// Counter-based Gaussian noise: a pure function of (seed, sample, step, mode).
//
// Modes 2k+1 and 2k+2 share one Box-Muller pair (cosine and sine branch), so
// the value for mode n never depends on how many modes a caller simulates.

#include <cstddef>
#include <cstdint>

namespace seelab {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Standard normal for 1-based mode `mode`.
double gaussian_increment(std::uint64_t seed, std::uint64_t sample, std::uint64_t step, std::uint64_t mode);

/// out[i] = gaussian_increment(seed, sample, step, first_mode + i) for i < count.
void fill_gaussians(std::uint64_t seed, std::uint64_t sample, std::uint64_t step, std::uint64_t first_mode,
                    std::size_t count, double* out);

}  // namespace seelab
