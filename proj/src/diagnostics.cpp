#include "ccmd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccmd/errors.hpp"

namespace ccmd {

double ridge_psi(const RidgeInstance& inst, const Vector& x) {
  return inst.evaluate_F(x) + evaluate(Regularizer{inst.mu, inst.q, inst.box}, x);
}

Optimum exact_optimum(const RidgeInstance& inst) {
  Vector x(inst.d);
  for (int j = 0; j < inst.d; ++j) {
    const double xs = inst.x_star[j];
    if (inst.mu == 0.0 || xs == 0.0) {
      x[j] = xs;
    } else {
      auto phi = [&](double s) { return 2.0 / 3.0 * (s - xs) + power_grad(s, inst.mu, inst.q); };
      double lo = std::min(0.0, xs), hi = std::max(0.0, xs);
      for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) < 0.0) lo = mid; else hi = mid;
      }
      x[j] = std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi;
    }
    if (std::isfinite(inst.box)) x[j] = std::clamp(x[j], -inst.box, inst.box);
  }
  return Optimum{x, ridge_psi(inst, x)};
}

CertificateReport certificate_check(const RunTrace& trace, const GeometryParams& params,
                                    const Regularizer& omega,
                                    const std::function<double(const Vector&)>& psi,
                                    const Vector& x, double tolerance) {
  if (trace.thin != 1) throw DiagnosticUnavailable("certificate needs an unthinned trace");
  CertificateReport rep;
  rep.min_scaled_slack = std::numeric_limits<double>::infinity();
  const double psi_x = psi(x);
  size_t idx = 0;
  for (size_t s = 0; s < trace.stages.size(); ++s) {
    const StageInfo& st = trace.stages[s];
    const IterationRecord* first = idx < trace.records.size() ? &trace.records[idx] : nullptr;
    if (!first || first->stage != static_cast<int>(s))
      throw DiagnosticUnavailable("trace is missing records for a stage");
    const double init = first->gamma * bregman(omega, x, st.start);
    double mart = 0.0, noise = 0.0, det = 0.0;
    for (long T = 1; T <= st.iterations; ++T, ++idx) {
      if (idx >= trace.records.size()) throw DiagnosticUnavailable("trace truncated");
      const IterationRecord& r = trace.records[idx];
      if (r.noise.size() == 0) throw DiagnosticUnavailable("trace has no realized noise");
      mart += r.alpha * r.noise.dot(x - r.x);
      noise += noise_increment(params, r.alpha, r.gamma, std::pow(dual_norm(r.noise, params.q), params.p));
      if (params.r == 0.0 && params.L > 0.0 &&
          deterministic_base(params, trace.algorithm, r.alpha, r.gamma, r.A) > 1.0)
        ++rep.degenerate_base_violations;
      det += deterministic_increment(params, trace.algorithm, r.alpha, r.gamma, r.A);

      CertificateRow row;
      row.stage = static_cast<int>(s);
      row.T = T;
      row.lhs = r.A * (psi(r.x_avg) - psi_x) + r.gamma * bregman(omega, x, r.x_next);
      row.init = init;
      row.martingale = mart;
      row.noise_moment = noise;
      row.deterministic = det;
      row.rhs = init + mart + noise + det;
      row.slack = row.rhs - row.lhs;
      const double scale = 1.0 + std::abs(row.rhs);
      rep.min_scaled_slack = std::min(rep.min_scaled_slack, row.slack / scale);
      if (row.slack < -tolerance * scale) ++rep.violations;
      rep.rows.push_back(row);
    }
  }
  rep.ok = rep.violations == 0 && rep.degenerate_base_violations == 0;
  return rep;
}

std::vector<double> expectation_bound(const StepSequence& seq, const GeometryParams& params,
                                      Target target, double V0) {
  std::vector<double> out(seq.size());
  const double moment = std::pow(params.sigma, params.p);
  double acc = seq.gamma_t(1) * V0;
  for (long T = 1; T <= seq.size(); ++T) {
    const double a = seq.alpha_t(T), g = seq.gamma_t(T), A = seq.A_t(T);
    acc += noise_increment(params, a, g, moment) + deterministic_increment(params, target, a, g, A);
    out[T - 1] = acc / A;
  }
  return out;
}

double lower_bound_horizon(double mu, double q, double sigma, double epsilon, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("gamma", "must lie in (0, 1)");
  const double p = dual_exponent(q);
  return 1.0 / (2.0 * std::pow(p, q - 1.0)) * (sigma / mu) * std::pow(sigma / epsilon, q - 1.0) *
         std::log(1.0 / (1.0 - gamma));
}

LowerBoundReport lower_bound_experiment(const LowerBoundConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trials", "must be >= 1");
  // Validates the precondition on epsilon.
  const BernoulliInstance probe = make_bernoulli_instance(cfg.mu, cfg.q, cfg.sigma, cfg.epsilon, 1);

  LowerBoundReport rep;
  rep.T_bound = lower_bound_horizon(cfg.mu, cfg.q, cfg.sigma, cfg.epsilon, cfg.gamma);
  rep.T = cfg.T_override >= 0 ? cfg.T_override : static_cast<long>(std::floor(rep.T_bound));
  rep.s = probe.s;
  rep.C = probe.C;
  rep.theory_rate = 1.0 - cfg.gamma;
  rep.all_zero_theory = std::pow(1.0 - probe.s, static_cast<double>(rep.T));
  rep.threshold =
      rep.theory_rate - 3.0 * std::sqrt(rep.theory_rate * cfg.gamma / static_cast<double>(cfg.trials));

  const GeometryParams params = derive_params(cfg.q, 2.0, 0.0,
                                              effective_uniform_convexity(cfg.mu, cfg.q), cfg.sigma);
  const Regularizer H = make_regularizer(cfg.mu, cfg.q);
  StepSequence seq;
  if (rep.T > 0) seq = expand(default_schedule(params, cfg.algorithm), params, rep.T);

  long failures = 0, all_zero = 0;
  for (long trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(trial), 11);
    const int nu = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
    const BernoulliInstance inst = make_bernoulli_instance(cfg.mu, cfg.q, cfg.sigma, cfg.epsilon, nu);
    double x_out = 0.0;
    bool zero = true;
    if (rep.T > 0) {
      auto oracle = bernoulli_oracle(inst);
      const Vector x1 = Vector::Zero(1);
      SolveResult res = cfg.algorithm == Target::kNacsmd
                            ? run_nacsmd(*oracle, H, seq, x1, rep.T, rng)
                            : run_acsmd(*oracle, H, seq, x1, rep.T, rng);
      x_out = res.x_avg[0];
      for (const auto& rec : res.trace.records) zero = zero && rec.gradient[0] == 0.0;
    }
    const double gap = inst.psi(x_out) - inst.psi_min();
    if (gap >= cfg.epsilon * (1.0 - 1e-9)) ++failures;
    if (zero) ++all_zero;
  }
  rep.empirical_failure_rate = static_cast<double>(failures) / cfg.trials;
  rep.all_zero_rate = static_cast<double>(all_zero) / cfg.trials;
  rep.ok = rep.empirical_failure_rate >= rep.threshold;
  return rep;
}

double martingale_tail_bound(double tau, double sigma, double R, double q,
                             const std::vector<double>& beta) {
  if (tau <= 0.0) return 1.0;
  const double p = dual_exponent(q);
  const double sr = sigma * R;
  double s2 = 0.0, sq = 0.0;
  for (double b : beta) {
    s2 += b * b;
    sq += std::pow(std::abs(b), q);
  }
  const double Sigma2 = 3.0 * sr * std::sqrt(s2);
  const double Sigmaq = 3.0 * sr * std::pow(sq, 1.0 / q);

  double bound = tau <= Sigma2 * Sigma2 / sr ? std::exp(-0.25 * (tau / Sigma2) * (tau / Sigma2))
                                             : std::exp(-tau / (4.0 * sr));
  const double sq_q = std::pow(Sigmaq, q);
  const double threshold =
      std::max(sq_q / std::pow(sr, q - 1.0), q * sq_q / std::pow(2.0 * sr, q - 1.0));
  if (tau > threshold) {
    double heavy = std::exp(-std::pow(q, -1.0 / (q - 1.0)) / p * std::pow(tau / Sigmaq, p));
    bound = std::min(bound, heavy);
  }
  return std::min(1.0, bound);
}

ConcentrationReport concentration_check(const ConcentrationConfig& cfg) {
  if (cfg.noise == NoiseKind::kPareto)
    throw ParameterError("noise", "heavy-tailed noise has no finite mgf bound");
  if (cfg.noise != NoiseKind::kBoundedSphere)
    throw ParameterError("noise", "only bounded_sphere noise has a calibrated mgf scale");
  if (cfg.T < 1 || cfg.trials < 1 || cfg.d < 1) throw ParameterError("T", "sizes must be >= 1");

  const NoiseModel noise{cfg.noise, cfg.radius, cfg.q, 3.0};
  const double p = dual_exponent(cfg.q);
  ConcentrationReport rep;
  rep.sigma = noise.mgf_sigma();

  std::vector<double> beta(cfg.T);
  for (long t = 1; t <= cfg.T; ++t) beta[t - 1] = std::pow(static_cast<double>(t), cfg.weight_power);
  double s2 = 0.0, sq = 0.0;
  for (double b : beta) {
    s2 += b * b;
    sq += std::pow(b, cfg.q);
  }
  rep.Sigma2 = 3.0 * rep.sigma * cfg.R * std::sqrt(s2);
  rep.Sigmaq = 3.0 * rep.sigma * cfg.R * std::pow(sq, 1.0 / cfg.q);

  // Scripted path: x_star - x_t = R * u_t with ||u_t||_q = 1.
  std::vector<Vector> dirs(cfg.T);
  for (long t = 0; t < cfg.T; ++t) {
    Vector u(cfg.d);
    for (int j = 0; j < cfg.d; ++j) u[j] = std::cos(0.7 * static_cast<double>(t) + 1.3 * j);
    dirs[t] = cfg.R / lq_norm(u, cfg.q) * u;
  }

  std::vector<double> taus;
  for (double f : cfg.tau_over_sigma2) taus.push_back(f * rep.Sigma2);
  std::vector<long> exceed(taus.size(), 0);
  for (long trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(trial), 13);
    double S = 0.0;
    for (long t = 0; t < cfg.T; ++t) S += beta[t] * noise.sample(cfg.d, rng).dot(dirs[t]);
    for (size_t i = 0; i < taus.size(); ++i)
      if (S > taus[i]) ++exceed[i];
  }
  rep.ok = true;
  const double n = static_cast<double>(cfg.trials);
  for (size_t i = 0; i < taus.size(); ++i) {
    TailPoint tp;
    tp.tau = taus[i];
    tp.empirical = exceed[i] / n;
    tp.standard_error = std::sqrt(tp.empirical * (1.0 - tp.empirical) / n);
    tp.bound = martingale_tail_bound(tp.tau, rep.sigma, cfg.R, cfg.q, beta);
    tp.ok = tp.empirical <= tp.bound + 3.0 * tp.standard_error;
    rep.ok = rep.ok && tp.ok;
    rep.tails.push_back(tp);
  }

  Rng rng = make_stream(cfg.seed, 0, 17);
  double acc = 0.0;
  for (long i = 0; i < cfg.mgf_draws; ++i)
    acc += std::exp(std::pow(dual_norm(noise.sample(cfg.d, rng), cfg.q) / rep.sigma, p));
  rep.mgf = acc / static_cast<double>(cfg.mgf_draws);
  rep.mgf_ok = rep.mgf <= 2.0 * (1.0 + 1e-9);
  rep.ok = rep.ok && rep.mgf_ok;
  return rep;
}

}  // namespace ccmd
