#include "ccmd/geometry.hpp"

#include <cmath>
#include <limits>

#include "ccmd/errors.hpp"
#include "ccmd/rng.hpp"

namespace ccmd {

GeometryParams derive_params(double q, double kappa, double L, double mu, double sigma,
                             double R) {
  if (!(q >= 2.0) || !std::isfinite(q)) throw ParameterError("q", "must be finite and >= 2");
  if (!(kappa > 1.0 && kappa <= 2.0)) throw ParameterError("kappa", "must lie in (1, 2]");
  if (kappa > q) throw ParameterError("kappa", "must not exceed q");
  if (!(L >= 0.0) || !std::isfinite(L)) throw ParameterError("L", "must be finite and >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu", "must be finite and > 0");
  if (!(sigma >= 0.0)) throw ParameterError("sigma", "must be >= 0");
  if (!(R > 0.0)) throw ParameterError("R", "must be > 0");

  GeometryParams gp;
  gp.q = q;
  gp.kappa = kappa;
  gp.L = L;
  gp.mu = mu;
  gp.sigma = sigma;
  gp.R = R;
  gp.r = (q - kappa) / kappa;
  gp.p = dual_exponent(q);
  // std::pow(0, 0) == 1, which is the convention we want for kappa == q.
  gp.M = std::pow(gp.r / q, gp.r) * L;
  return gp;
}

double dual_exponent(double q) { return q / (q - 1.0); }

double lq_norm(const Vector& x, double q) {
  if (!x.allFinite()) throw ParameterError("x", "non-finite entry");
  if (q == 2.0) return x.norm();
  double scale = x.cwiseAbs().maxCoeff();
  if (x.size() == 0 || scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

double dual_norm(const Vector& g, double q) { return lq_norm(g, dual_exponent(q)); }

double bregman(const Regularizer& omega, const Vector& x, const Vector& y) {
  const double mu = omega.mu, q = omega.q;
  if (q == 2.0) return 0.5 * mu * (x - y).squaredNorm();
  double d = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double a = x[j], b = y[j];
    d += mu / q * (std::pow(std::abs(a), q) - std::pow(std::abs(b), q)) -
         power_grad(b, mu, q) * (a - b);
  }
  return d;
}

namespace {

// (|t|^q - 1 - q(t-1)) / |t-1|^q with t = 1 + u.
double uc_ratio(double u, double q) {
  double t = 1.0 + u;
  return (std::pow(std::abs(t), q) - 1.0 - q * u) / std::pow(std::abs(u), q);
}

}  // namespace

double uniform_convexity_constant(double q) {
  if (!(q >= 2.0)) throw ParameterError("q", "must be >= 2");
  if (q == 2.0) return 1.0;
  // y = 0 gives ratio 1; |t| -> infinity also tends to 1. Scan the rest on a
  // log grid in u = t - 1, then refine the best bracket by golden section.
  double best = 1.0, best_u = 0.0;
  const int n = 4000;
  for (int sgn : {-1, 1}) {
    for (int i = 0; i <= n; ++i) {
      double u = sgn * std::pow(10.0, -3.0 + 6.0 * i / n);
      double v = uc_ratio(u, q);
      if (v < best) {
        best = v;
        best_u = u;
      }
    }
  }
  if (best_u == 0.0) return 1.0;
  const double step = std::pow(10.0, 6.0 / n);
  double a = best_u / step, b = best_u * step;
  if (a > b) std::swap(a, b);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = uc_ratio(c, q), fd = uc_ratio(d, q);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::abs(best_u); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = uc_ratio(c, q);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = uc_ratio(d, q);
    }
  }
  return std::min({best, fc, fd, 1.0});
}

double effective_uniform_convexity(double mu, double q) {
  return mu * uniform_convexity_constant(q) * (1.0 - 1e-9);
}

ConvexityReport check_uniform_convexity(const DifferentiableFunction& f, int dim, double q,
                                        double mu, long samples, std::uint64_t seed,
                                        double scale) {
  Rng rng = make_stream(seed, 0, 0);
  ConvexityReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (long i = 0; i < samples; ++i) {
    Vector x = uniform_vector(rng, dim, -scale, scale);
    Vector y = uniform_vector(rng, dim, -scale, scale);
    double n = lq_norm(x - y, q);
    if (n < 1e-12) continue;
    double gap = f.value(x) - f.value(y) - f.gradient(y).dot(x - y);
    double ratio = gap / (std::pow(n, q) / q);
    ++rep.pairs;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.witness_x = x;
      rep.witness_y = y;
    }
  }
  rep.holds = rep.pairs > 0 && rep.min_ratio >= mu * (1.0 - 1e-9);
  return rep;
}

SmoothnessReport check_weak_smoothness(const DifferentiableFunction& F, int dim, double kappa,
                                       double L, long samples, std::uint64_t seed,
                                       double norm_q, double scale) {
  Rng rng = make_stream(seed, 0, 1);
  SmoothnessReport rep;
  rep.max_ratio = 0.0;
  for (long i = 0; i < samples; ++i) {
    Vector x = uniform_vector(rng, dim, -scale, scale);
    Vector y = uniform_vector(rng, dim, -scale, scale);
    double n = lq_norm(x - y, norm_q);
    if (n < 1e-12) continue;
    double gap = F.value(x) - F.value(y) - F.gradient(y).dot(x - y);
    double ratio = gap / (std::pow(n, kappa) / kappa);
    ++rep.pairs;
    if (rep.pairs == 1 || ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.witness_x = x;
      rep.witness_y = y;
    }
  }
  rep.holds = rep.pairs > 0 && rep.max_ratio <= L * (1.0 + 1e-9) + 1e-15;
  return rep;
}

double young_gap_bound(const GeometryParams& params, const Vector& x, const Vector& y,
                       double delta) {
  if (!(delta > 0.0)) throw ParameterError("delta", "must be > 0");
  double n = lq_norm(x - y, params.q);
  double dr = params.r == 0.0 ? 1.0 : std::pow(delta, params.r);
  return params.M / (params.q * dr) * std::pow(n, params.q) + params.L * delta;
}

}  // namespace ccmd
