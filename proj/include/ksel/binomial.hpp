#pragma once

#include <cstdint>

#include "ksel/rng.hpp"

namespace ksel {

/// Exact Binomial(n, p) sample. Small n*p uses geometric waiting times;
/// large n*p uses Hormann's BTRS transformed-rejection sampler, so a draw
/// costs O(1) expected time even for n up to 1e7 and beyond. Throws
/// std::invalid_argument for p outside [0, 1].
std::uint64_t sample_binomial(std::uint64_t n, double p, Rng& rng);

}  // namespace ksel
