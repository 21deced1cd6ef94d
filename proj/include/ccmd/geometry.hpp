#pragma once

#include <cstdint>
#include <functional>

#include "ccmd/regularizer.hpp"
#include "ccmd/types.hpp"

namespace ccmd {

struct GeometryParams {
  double q = 2.0;
  double kappa = 2.0;
  double L = 0.0;
  double mu = 1.0;
  double sigma = 0.0;
  double R = 1.0;
  // derived
  double r = 0.0;
  double M = 0.0;
  double p = 2.0;

  // 2M/mu, the ratio that appears in both step-size configurations.
  double kappa_ratio() const { return 2.0 * M / mu; }
};

GeometryParams derive_params(double q, double kappa, double L, double mu,
                             double sigma = 0.0, double R = 1.0);

double dual_exponent(double q);
double lq_norm(const Vector& x, double q);
// The l_p norm with p = q/(q-1).
double dual_norm(const Vector& g, double q);

double bregman(const Regularizer& omega, const Vector& x, const Vector& y);

// c_q = inf over x != y of D(x,y) / ((1/q)|x-y|^q) for (1/q)|.|^q on the
// line. Separability makes it valid coordinate-wise in any dimension, so
// (mu/q)||.||_q^q is (c_q*mu, q)-uniformly convex w.r.t. ||.||_q.
double uniform_convexity_constant(double q);

// c_q * mu, shaded down by 1e-9 relative so rounding in c_q never
// overstates the curvature.
double effective_uniform_convexity(double mu, double q);

struct DifferentiableFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct ConvexityReport {
  double min_ratio = 0.0;
  Vector witness_x;
  Vector witness_y;
  long pairs = 0;
  bool holds = false;  // min_ratio >= mu up to 1e-9 relative
};

// Pairs are drawn uniformly from [-scale, scale]^dim.
ConvexityReport check_uniform_convexity(const DifferentiableFunction& f, int dim, double q,
                                        double mu, long samples, std::uint64_t seed,
                                        double scale = 1.0);

struct SmoothnessReport {
  double max_ratio = 0.0;
  Vector witness_x;
  Vector witness_y;
  long pairs = 0;
  bool holds = false;  // max_ratio <= L up to 1e-9 relative
};

// Ratio [F(x)-F(y)-<grad F(y),x-y>] / ((1/kappa)||x-y||_norm_q^kappa).
SmoothnessReport check_weak_smoothness(const DifferentiableFunction& F, int dim, double kappa,
                                       double L, long samples, std::uint64_t seed,
                                       double norm_q = 2.0, double scale = 1.0);

// (M/(q delta^r))||x-y||_q^q + L delta, the Young-type upper bound for
// (L/kappa)||x-y||^kappa.
double young_gap_bound(const GeometryParams& params, const Vector& x, const Vector& y,
                       double delta);

}  // namespace ccmd
