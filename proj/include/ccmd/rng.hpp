#pragma once

#include <cstdint>
#include <random>

#include "ccmd/types.hpp"

namespace ccmd {

using Rng = std::mt19937_64;

// Independent substream for (seed, run, stream). The three words go through
// std::seed_seq, so neighbouring indices give unrelated engine states.
Rng make_stream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream = 0);

double uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);
Vector uniform_vector(Rng& rng, int d, double lo, double hi);
Vector normal_vector(Rng& rng, int d);

}  // namespace ccmd
