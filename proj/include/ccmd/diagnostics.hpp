#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ccmd/geometry.hpp"
#include "ccmd/oracles.hpp"
#include "ccmd/schedule.hpp"
#include "ccmd/solvers.hpp"

namespace ccmd {

struct Optimum {
  Vector x;
  double psi = 0.0;
};

// Psi = F + H for the ridge instance, H = (mu/q)||x||_q^q.
double ridge_psi(const RidgeInstance& inst, const Vector& x);

// Coordinate-wise bisection on (2/3)(x_j - x*_j) + mu|x_j|^(q-1)sign(x_j) = 0,
// clamped to the instance box.
Optimum exact_optimum(const RidgeInstance& inst);

struct CertificateRow {
  int stage = 0;
  long T = 0;
  double lhs = 0.0;
  double init = 0.0;
  double martingale = 0.0;
  double noise_moment = 0.0;
  double deterministic = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct CertificateReport {
  std::vector<CertificateRow> rows;
  long violations = 0;
  // Smallest slack / (1 + |rhs|) over all rows.
  double min_scaled_slack = 0.0;
  // With r = 0 the deterministic term is only 0 if its base is <= 1.
  long degenerate_base_violations = 0;
  bool ok = false;
};

// Evaluates the pathwise convergence inequality at every T of every stage
// of the trace, against the comparator point x:
//   A_T [Psi(x^ag_{T+1}) - Psi(x)] + gamma_T D(x, x_{T+1})
//     <= gamma_1 D(x, x_1) + sum alpha_t <Delta_t, x - x_t>
//        + sum noise_increment(||Delta_t||_*^p) + sum deterministic_increment.
CertificateReport certificate_check(const RunTrace& trace, const GeometryParams& params,
                                    const Regularizer& omega,
                                    const std::function<double(const Vector&)>& psi,
                                    const Vector& x, double tolerance = 1e-6);

// Upper bound on E[Psi(x^ag_{T+1}) - Psi(x)] for T = 1..seq.size():
// (gamma_1 V0 + sum noise_increment(sigma^p) + sum deterministic_increment) / A_T.
std::vector<double> expectation_bound(const StepSequence& seq, const GeometryParams& params,
                                      Target target, double V0);

struct LowerBoundConfig {
  Target algorithm = Target::kAcsmd;
  double mu = 1.0;
  double q = 2.0;
  double sigma = 1.0;
  double epsilon = 0.05;
  double gamma = 0.5;  // target failure probability 1 - gamma
  long trials = 400;
  std::uint64_t seed = 0;
  // When set, overrides the query budget implied by the bound.
  long T_override = -1;
};

struct LowerBoundReport {
  double T_bound = 0.0;      // real-valued query budget from the bound
  long T = 0;                // queries actually used: floor(T_bound)
  double s = 0.0;
  double C = 0.0;
  double theory_rate = 0.0;  // 1 - gamma
  double empirical_failure_rate = 0.0;
  double all_zero_rate = 0.0;
  double all_zero_theory = 0.0;  // (1 - s)^T
  double threshold = 0.0;        // theory_rate - 3 binomial standard errors
  bool ok = false;
};

double lower_bound_horizon(double mu, double q, double sigma, double epsilon, double gamma);

// A trial fails when the output's suboptimality on the realized instance is
// at least epsilon (relative rounding allowance 1e-9): reaching accuracy
// epsilon means getting strictly inside the epsilon-sublevel set.
LowerBoundReport lower_bound_experiment(const LowerBoundConfig& cfg);

struct ConcentrationConfig {
  NoiseKind noise = NoiseKind::kBoundedSphere;
  double q = 2.0;
  int d = 4;
  double radius = 1.0;  // ||Delta||_* for bounded_sphere
  double R = 1.0;       // ||x_star - x_t|| along the scripted path
  double weight_power = 0.0;  // beta_t = t^n
  long T = 100;
  long trials = 100000;
  long mgf_draws = 1000000;
  std::uint64_t seed = 0;
  std::vector<double> tau_over_sigma2 = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0};
};

struct TailPoint {
  double tau = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct ConcentrationReport {
  double sigma = 0.0;  // mgf-calibrated scale
  double Sigma2 = 0.0;
  double Sigmaq = 0.0;
  std::vector<TailPoint> tails;
  double mgf = 0.0;
  bool mgf_ok = false;
  bool ok = false;
};

// Tail bound for sum beta_t W_t > tau. The sub-Gaussian/linear branch uses
// the weaker constant 4 in the linear regime; the heavy branch uses the
// constant actually obtained by the Chernoff optimization,
// exp(-(1/p) q^(-1/(q-1)) (tau/Sigma_q)^p), and only above the larger of the
// two regime thresholds. The smaller of the applicable bounds is returned.
double martingale_tail_bound(double tau, double sigma, double R, double q,
                             const std::vector<double>& beta);

ConcentrationReport concentration_check(const ConcentrationConfig& cfg);

}  // namespace ccmd
