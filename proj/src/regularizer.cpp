#include "ccmd/regularizer.hpp"

#include <cmath>

#include "ccmd/errors.hpp"

namespace ccmd {

Regularizer make_regularizer(double mu, double q, double box) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ParameterError("mu", "must be finite and >= 0");
  if (!(q >= 2.0) || !std::isfinite(q)) throw ParameterError("q", "must be finite and >= 2");
  if (!(box > 0.0)) throw ParameterError("box", "must be > 0");
  return Regularizer{mu, q, box};
}

double power_grad(double x, double mu, double q) {
  if (x == 0.0) return 0.0;
  double m = mu * std::pow(std::abs(x), q - 1.0);
  return x > 0.0 ? m : -m;
}

double evaluate(const Regularizer& H, const Vector& x) {
  if (H.q == 2.0) return 0.5 * H.mu * x.squaredNorm();
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), H.q);
  return H.mu / H.q * s;
}

Vector grad(const Regularizer& H, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) g[j] = power_grad(x[j], H.mu, H.q);
  return g;
}

namespace {

double clamp_box(const Regularizer& H, double x) {
  if (!H.boxed()) return x;
  return std::min(H.box, std::max(-H.box, x));
}

}  // namespace

Vector composite_prox(const Regularizer& H, const Vector& g, const Vector& y, double alpha,
                      double gamma) {
  if (!(alpha > 0.0)) throw ParameterError("alpha", "must be > 0");
  if (!(gamma > 0.0)) throw ParameterError("gamma", "must be > 0");
  if (g.size() != y.size()) throw ParameterError("g", "dimension mismatch");
  const double denom = (alpha + gamma) * H.mu;
  const double inv = 1.0 / (H.q - 1.0);
  Vector x(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    double v = gamma * power_grad(y[j], H.mu, H.q) - alpha * g[j];
    double a = std::abs(v);
    double xj;
    if (a < 1e-300) {
      xj = 0.0;
    } else if (H.q == 2.0) {
      xj = v / denom;
    } else {
      xj = std::pow(a / denom, inv);
      if (v < 0.0) xj = -xj;
    }
    x[j] = clamp_box(H, xj);
  }
  return x;
}

Vector prox_bisection_oracle(const Regularizer& H, const Vector& g, const Vector& y,
                             double alpha, double gamma, double tol) {
  if (!(alpha >= 0.0)) throw ParameterError("alpha", "must be >= 0");
  if (!(gamma >= 0.0)) throw ParameterError("gamma", "must be >= 0");
  if (!(alpha + gamma > 0.0)) throw ParameterError("gamma", "alpha + gamma must be > 0");
  if (!(tol > 0.0)) throw ParameterError("tol", "must be > 0");
  Vector x(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double target = gamma * power_grad(y[j], H.mu, H.q) - alpha * g[j];
    // Increasing in s: derivative of the scalar objective.
    auto phi = [&](double s) { return (alpha + gamma) * power_grad(s, H.mu, H.q) - target; };
    double lo = -1.0, hi = 1.0;
    int doublings = 0;
    while (phi(lo) > 0.0) {
      lo *= 2.0;
      if (++doublings > 200) throw NumericalError("prox bracket expansion failed");
    }
    while (phi(hi) < 0.0) {
      hi *= 2.0;
      if (++doublings > 200) throw NumericalError("prox bracket expansion failed");
    }
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (phi(mid) < 0.0) lo = mid; else hi = mid;
    }
    x[j] = clamp_box(H, 0.5 * (lo + hi));
  }
  return x;
}

Vector euclidean_prox(const Regularizer& H, const Vector& v, double weight, double quad) {
  if (!(quad > 0.0)) throw ParameterError("quad", "must be > 0");
  if (!(weight >= 0.0)) throw ParameterError("weight", "must be >= 0");
  Vector x(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double xj;
    if (H.q == 2.0) {
      xj = quad * v[j] / (weight * H.mu + quad);
    } else {
      // The root lies between 0 and v_j.
      double lo = std::min(0.0, v[j]), hi = std::max(0.0, v[j]);
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (weight * power_grad(mid, H.mu, H.q) + quad * (mid - v[j]) < 0.0) lo = mid; else hi = mid;
      }
      xj = 0.5 * (lo + hi);
    }
    x[j] = clamp_box(H, xj);
  }
  return x;
}

}  // namespace ccmd
