#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "ccmd/rng.hpp"
#include "ccmd/types.hpp"

namespace ccmd {

// Stochastic first-order oracle G(x, xi). Oracles are immutable; all
// randomness comes from the caller's Rng so replicas can use disjoint streams.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual int dimension() const = 0;
  virtual Vector sample_gradient(const Vector& x, Rng& rng) const = 0;

  // Exact E[G(x, xi)]. Only synthetic oracles can provide it.
  virtual bool has_mean_gradient() const { return false; }
  virtual Vector mean_gradient(const Vector& x) const;

  virtual bool has_objective() const { return false; }
  virtual double evaluate_F(const Vector& x) const;

  // sigma with E||G - grad F||_*^p <= sigma^p, and that exponent p.
  virtual double noise_level() const = 0;
  virtual double noise_moment_exponent() const = 0;
};

// Least-squares ridge instance: a ~ U[-1,1]^d, b = <a, x_star> + N(0, sigma_b^2).
struct RidgeInstance {
  int d = 1;
  Vector x_star;
  double sigma_b = 0.0;
  double mu = 1.0;  // regularizer weight
  double q = 2.0;
  double box = std::numeric_limits<double>::infinity();

  static constexpr double mu_F = 2.0 / 3.0;

  // Smoothness constant of F w.r.t. ||.||_q (kappa = 2).
  double L() const;
  // Weak-smoothness constant of F for kappa < 2. Needs a finite box, since
  // the quadratic is only (L, kappa)-weakly smooth on bounded sets.
  double L_kappa(double kappa) const;
  // The noise level quoted for step-size purposes:
  // d^(2/p) sigma_b^2 + 2 d^2 R^2.
  double declared_sigma(double R) const;
  double evaluate_F(const Vector& x) const;
  Vector mean_gradient(const Vector& x) const;
};

RidgeInstance make_ridge_instance(int d, double q, double mu, double sigma_b, Vector x_star,
                                  double box = std::numeric_limits<double>::infinity());

std::shared_ptr<const Oracle> ridge_oracle(const RidgeInstance& inst, double declared_sigma);

enum class NoiseKind { kNone, kGaussian, kBoundedSphere, kPareto };

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double sigma = 0.0;       // p-th dual-moment level
  double q = 2.0;           // primal exponent; the dual norm is l_{q/(q-1)}
  double tail_index = 3.0;  // Pareto shape, must exceed p

  Vector sample(int d, Rng& rng) const;
  // Scale sigma' with E exp(||Delta||_*^p / sigma'^p) <= 2. Only defined for
  // bounded_sphere, where ||Delta||_* = sigma exactly.
  double mgf_sigma() const;
};

// grad F(x) + Delta with Delta drawn from `noise`.
std::shared_ptr<const Oracle> additive_noise_oracle(
    int d, std::function<Vector(const Vector&)> mean_grad, NoiseModel noise,
    std::function<double(const Vector&)> F = nullptr);

// One-dimensional adversarial instance f_nu(x, b) = nu*b*C*x with
// b = 1/s w.p. s and 0 otherwise.
struct BernoulliInstance {
  double mu = 1.0;
  double q = 2.0;
  double sigma = 1.0;
  double epsilon = 0.1;
  double C = 0.0;
  double s = 0.0;
  int nu = 1;

  double p() const { return q / (q - 1.0); }
  // Psi_nu(x) = nu*C*x + (mu/q)|x|^q and its minimum.
  double psi(double x) const;
  double psi_min() const;
  double x_opt() const;
};

BernoulliInstance make_bernoulli_instance(double mu, double q, double sigma, double epsilon,
                                          int nu);
// nu is drawn uniformly from {-1, +1} using nu_seed.
BernoulliInstance make_bernoulli_instance_seeded(double mu, double q, double sigma,
                                                 double epsilon, std::uint64_t nu_seed);

std::shared_ptr<const Oracle> bernoulli_oracle(const BernoulliInstance& inst);

}  // namespace ccmd
