#include "ccmd/oracles.hpp"

#include <cmath>
#include <utility>

#include "ccmd/errors.hpp"
#include "ccmd/geometry.hpp"

namespace ccmd {

Vector Oracle::mean_gradient(const Vector&) const {
  throw DiagnosticUnavailable("oracle does not expose its mean gradient");
}

double Oracle::evaluate_F(const Vector&) const {
  throw DiagnosticUnavailable("oracle does not expose its objective");
}

double RidgeInstance::L() const { return 2.0 / 3.0 * std::pow(d, 1.0 - 2.0 / q); }

double RidgeInstance::L_kappa(double kappa) const {
  if (kappa == 2.0) return L();
  if (!std::isfinite(box)) throw ParameterError("box", "kappa < 2 needs a bounded box");
  double diam = 2.0 * box * std::pow(d, 1.0 / q);
  return kappa / 2.0 * L() * std::pow(diam, 2.0 - kappa);
}

double RidgeInstance::declared_sigma(double R) const {
  double p = dual_exponent(q);
  return std::pow(d, 2.0 / p) * sigma_b * sigma_b + 2.0 * d * d * R * R;
}

double RidgeInstance::evaluate_F(const Vector& x) const {
  return (x - x_star).squaredNorm() / 3.0 + sigma_b * sigma_b;
}

Vector RidgeInstance::mean_gradient(const Vector& x) const { return 2.0 / 3.0 * (x - x_star); }

RidgeInstance make_ridge_instance(int d, double q, double mu, double sigma_b, Vector x_star,
                                  double box) {
  if (d < 1) throw ParameterError("d", "must be >= 1");
  if (!(sigma_b >= 0.0)) throw ParameterError("sigma_b", "must be >= 0");
  if (x_star.size() != d) throw ParameterError("x_star", "dimension mismatch");
  if (!(q >= 2.0)) throw ParameterError("q", "must be >= 2");
  if (!(mu >= 0.0)) throw ParameterError("mu", "must be >= 0");
  return RidgeInstance{d, std::move(x_star), sigma_b, mu, q, box};
}

namespace {

class RidgeOracle final : public Oracle {
 public:
  RidgeOracle(RidgeInstance inst, double sigma) : inst_(std::move(inst)), sigma_(sigma) {}

  int dimension() const override { return inst_.d; }

  Vector sample_gradient(const Vector& x, Rng& rng) const override {
    Vector a = uniform_vector(rng, inst_.d, -1.0, 1.0);
    double b = a.dot(inst_.x_star) + inst_.sigma_b * standard_normal(rng);
    return 2.0 * (a.dot(x) - b) * a;
  }

  bool has_mean_gradient() const override { return true; }
  Vector mean_gradient(const Vector& x) const override { return inst_.mean_gradient(x); }
  bool has_objective() const override { return true; }
  double evaluate_F(const Vector& x) const override { return inst_.evaluate_F(x); }
  double noise_level() const override { return sigma_; }
  double noise_moment_exponent() const override { return dual_exponent(inst_.q); }

 private:
  RidgeInstance inst_;
  double sigma_;
};

}  // namespace

std::shared_ptr<const Oracle> ridge_oracle(const RidgeInstance& inst, double declared_sigma) {
  return std::make_shared<RidgeOracle>(inst, declared_sigma);
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "bounded_sphere") return NoiseKind::kBoundedSphere;
  if (name == "pareto" || name == "heavy_tail_pareto") return NoiseKind::kPareto;
  throw ParameterError("noise", "unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kBoundedSphere: return "bounded_sphere";
    case NoiseKind::kPareto: return "pareto";
  }
  return "unknown";
}

Vector NoiseModel::sample(int d, Rng& rng) const {
  if (sigma == 0.0 || kind == NoiseKind::kNone) return Vector::Zero(d);
  const double p = dual_exponent(q);
  switch (kind) {
    case NoiseKind::kGaussian: {
      // E|Z|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi)
      double mp = std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(M_PI);
      double s = sigma / std::pow(d * mp, 1.0 / p);
      return s * normal_vector(rng, d);
    }
    case NoiseKind::kBoundedSphere: {
      Vector u = normal_vector(rng, d);
      double n = lq_norm(u, p);
      while (n == 0.0) {
        u = normal_vector(rng, d);
        n = lq_norm(u, p);
      }
      return sigma / n * u;
    }
    case NoiseKind::kPareto: {
      if (!(tail_index > p)) throw ParameterError("tail_index", "must exceed p");
      // Symmetric Pareto(x_m, a): E|X|^p = a x_m^p / (a - p).
      double xm = sigma * std::pow((tail_index - p) / (d * tail_index), 1.0 / p);
      Vector v(d);
      for (int j = 0; j < d; ++j) {
        double u = 1.0 - uniform(rng, 0.0, 1.0);  // (0, 1]
        double mag = xm * std::pow(u, -1.0 / tail_index);
        v[j] = uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag;
      }
      return v;
    }
    case NoiseKind::kNone: break;
  }
  return Vector::Zero(d);
}

double NoiseModel::mgf_sigma() const {
  if (kind != NoiseKind::kBoundedSphere)
    throw ParameterError("noise", "mgf calibration is only defined for bounded_sphere");
  return sigma / std::pow(std::log(2.0), 1.0 / dual_exponent(q));
}

namespace {

class AdditiveNoiseOracle final : public Oracle {
 public:
  AdditiveNoiseOracle(int d, std::function<Vector(const Vector&)> g, NoiseModel noise,
                      std::function<double(const Vector&)> F)
      : d_(d), grad_(std::move(g)), noise_(noise), F_(std::move(F)) {}

  int dimension() const override { return d_; }
  Vector sample_gradient(const Vector& x, Rng& rng) const override {
    return grad_(x) + noise_.sample(d_, rng);
  }
  bool has_mean_gradient() const override { return true; }
  Vector mean_gradient(const Vector& x) const override { return grad_(x); }
  bool has_objective() const override { return static_cast<bool>(F_); }
  double evaluate_F(const Vector& x) const override {
    if (!F_) return Oracle::evaluate_F(x);
    return F_(x);
  }
  double noise_level() const override { return noise_.sigma; }
  double noise_moment_exponent() const override { return dual_exponent(noise_.q); }

 private:
  int d_;
  std::function<Vector(const Vector&)> grad_;
  NoiseModel noise_;
  std::function<double(const Vector&)> F_;
};

}  // namespace

std::shared_ptr<const Oracle> additive_noise_oracle(
    int d, std::function<Vector(const Vector&)> mean_grad, NoiseModel noise,
    std::function<double(const Vector&)> F) {
  if (d < 1) throw ParameterError("d", "must be >= 1");
  if (!(noise.sigma >= 0.0)) throw ParameterError("sigma", "must be >= 0");
  if (noise.kind == NoiseKind::kPareto && !(noise.tail_index > dual_exponent(noise.q)))
    throw ParameterError("tail_index", "must exceed p");
  return std::make_shared<AdditiveNoiseOracle>(d, std::move(mean_grad), noise, std::move(F));
}

double BernoulliInstance::psi(double x) const {
  return nu * C * x + mu / q * std::pow(std::abs(x), q);
}

double BernoulliInstance::psi_min() const {
  return -std::pow(std::pow(C, q) / mu, 1.0 / (q - 1.0)) / p();
}

double BernoulliInstance::x_opt() const { return -nu * std::pow(C / mu, 1.0 / (q - 1.0)); }

BernoulliInstance make_bernoulli_instance(double mu, double q, double sigma, double epsilon,
                                          int nu) {
  if (!(mu > 0.0)) throw ParameterError("mu", "must be > 0");
  if (!(q >= 2.0)) throw ParameterError("q", "must be >= 2");
  if (!(sigma > 0.0)) throw ParameterError("sigma", "must be > 0");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon", "must be > 0");
  if (nu != 1 && nu != -1) throw ParameterError("nu", "must be +1 or -1");
  const double p = dual_exponent(q);
  const double limit = std::pow(sigma, p) / (2.0 * p * std::pow(mu, p - 1.0));
  if (epsilon > limit)
    throw ParameterError("epsilon", "requires epsilon <= sigma^p / (2 p mu^(p-1)) = " +
                                        std::to_string(limit));
  BernoulliInstance b;
  b.mu = mu;
  b.q = q;
  b.sigma = sigma;
  b.epsilon = epsilon;
  b.nu = nu;
  b.C = std::pow(mu, 1.0 / q) * std::pow(epsilon * p, 1.0 / p);
  const double rhs =
      std::pow(2.0 * p * std::pow(mu, p - 1.0) * epsilon / std::pow(sigma, p), 1.0 / (p - 1.0));
  // s^(p-1) / (1-s)^p is increasing on (0, 1).
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double f = std::pow(mid, p - 1.0) / std::pow(1.0 - mid, p);
    if (f < rhs) lo = mid; else hi = mid;
  }
  b.s = 0.5 * (lo + hi);
  return b;
}

BernoulliInstance make_bernoulli_instance_seeded(double mu, double q, double sigma,
                                                 double epsilon, std::uint64_t nu_seed) {
  Rng rng = make_stream(nu_seed, 0, 7);
  int nu = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return make_bernoulli_instance(mu, q, sigma, epsilon, nu);
}

namespace {

class BernoulliOracle final : public Oracle {
 public:
  explicit BernoulliOracle(BernoulliInstance inst) : inst_(inst) {}

  int dimension() const override { return 1; }
  Vector sample_gradient(const Vector&, Rng& rng) const override {
    double b = uniform(rng, 0.0, 1.0) < inst_.s ? 1.0 / inst_.s : 0.0;
    return Vector::Constant(1, inst_.nu * b * inst_.C);
  }
  bool has_mean_gradient() const override { return true; }
  Vector mean_gradient(const Vector&) const override {
    return Vector::Constant(1, inst_.nu * inst_.C);
  }
  bool has_objective() const override { return true; }
  double evaluate_F(const Vector& x) const override { return inst_.nu * inst_.C * x[0]; }
  double noise_level() const override { return inst_.sigma; }
  double noise_moment_exponent() const override { return inst_.p(); }

 private:
  BernoulliInstance inst_;
};

}  // namespace

std::shared_ptr<const Oracle> bernoulli_oracle(const BernoulliInstance& inst) {
  return std::make_shared<BernoulliOracle>(inst);
}

}  // namespace ccmd
