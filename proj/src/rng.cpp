#include "ccmd/rng.hpp"

namespace ccmd {

Rng make_stream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(run), hi(run), lo(stream), hi(stream)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

Vector uniform_vector(Rng& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(d);
  for (int j = 0; j < d; ++j) v[j] = dist(rng);
  return v;
}

Vector normal_vector(Rng& rng, int d) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(d);
  for (int j = 0; j < d; ++j) v[j] = dist(rng);
  return v;
}

}  // namespace ccmd
