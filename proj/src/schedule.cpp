#include "ccmd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccmd/errors.hpp"

namespace ccmd {

std::string to_string(Target t) { return t == Target::kNacsmd ? "nacsmd" : "acsmd"; }

Target parse_target(const std::string& name) {
  if (name == "nacsmd") return Target::kNacsmd;
  if (name == "acsmd") return Target::kAcsmd;
  throw ParameterError("algorithm", "unknown target '" + name + "'");
}

StepSchedule polynomial_schedule(Target target, double m, double offset, bool repair) {
  if (!(m > -1.0) || !std::isfinite(m)) throw ParameterError("m", "must be finite and > -1");
  if (!(offset > -1.0) || !std::isfinite(offset))
    throw ParameterError("offset", "must be finite and > -1");
  StepSchedule s;
  s.target = target;
  s.kind = ScheduleKind::kPolynomial;
  s.m = m;
  s.offset = offset;
  s.repair = repair;
  return s;
}

StepSchedule custom_schedule(Target target, std::vector<double> alpha, std::vector<double> gamma) {
  if (alpha.size() != gamma.size() || alpha.empty())
    throw ParameterError("custom", "alpha and gamma must be non-empty and equally long");
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] > 0.0) || !(gamma[i] > 0.0))
      throw ParameterError("custom", "step sizes must be positive");
  }
  StepSchedule s;
  s.target = target;
  s.kind = ScheduleKind::kCustom;
  s.custom_alpha = std::move(alpha);
  s.custom_gamma = std::move(gamma);
  s.repair = false;
  return s;
}

double default_degree(const GeometryParams& params, Target target) {
  const double smooth = (2.0 - params.q) / (params.q - 1.0);
  if (params.r == 0.0) return smooth;
  double m = target == Target::kNacsmd ? 1.0 / params.r - 1.0 : params.q / params.r - 2.0;
  return std::max(m, smooth);
}

double default_offset(const GeometryParams& params, Target target, double m) {
  double base = 2.0 * (m + 1.0) * params.M / params.mu;
  return target == Target::kNacsmd ? base : std::pow(base, 1.0 / params.q);
}

StepSchedule default_schedule(const GeometryParams& params, Target target) {
  double m = default_degree(params, target);
  return polynomial_schedule(target, m, default_offset(params, target, m), true);
}

double gamma_floor(const GeometryParams& params, Target target, double alpha, double A) {
  const double k = params.kappa_ratio();
  if (k == 0.0) return 0.0;
  if (target == Target::kNacsmd) return k * alpha;
  return k * std::pow(alpha, params.q) / std::pow(A, params.q - 1.0);
}

namespace {

void fill_polynomial(const StepSchedule& s, long n, std::vector<double>& alpha,
                     std::vector<double>& gamma) {
  alpha.resize(n);
  gamma.resize(n);
  for (long i = 0; i < n; ++i) {
    double t = static_cast<double>(i + 1);
    double shift = s.m >= 0.0 ? 1.0 : 0.0;
    alpha[i] = s.m == 0.0 ? 1.0 : std::pow(t + s.offset + shift, s.m);
    gamma[i] = s.safety_scale * std::pow(t + s.offset, s.m + 1.0) / (s.m + 1.0);
  }
}

std::vector<double> cumulative(const std::vector<double>& a) {
  std::vector<double> A(a.size());
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) A[i] = acc += a[i];
  return A;
}

}  // namespace

StepSequence expand(const StepSchedule& sched, const GeometryParams& params, long horizon) {
  if (horizon < 1) throw ParameterError("horizon", "must be >= 1");
  if (!(sched.safety_scale >= 1.0)) throw ParameterError("safety_scale", "must be >= 1");
  StepSequence seq;
  if (sched.kind == ScheduleKind::kCustom) {
    if (static_cast<long>(sched.custom_alpha.size()) < horizon)
      throw ParameterError("horizon", "exceeds custom schedule length");
    seq.alpha.assign(sched.custom_alpha.begin(), sched.custom_alpha.begin() + horizon);
    seq.gamma.assign(sched.custom_gamma.begin(), sched.custom_gamma.begin() + horizon);
    for (double& g : seq.gamma) g *= sched.safety_scale;
    seq.A = cumulative(seq.alpha);
    return seq;
  }

  long n = horizon + 1;
  std::vector<double> alpha, gamma, A;
  for (;;) {
    fill_polynomial(sched, n, alpha, gamma);
    A = cumulative(alpha);
    if (!sched.repair) break;
    double f = gamma_floor(params, sched.target, alpha[n - 1], A[n - 1]);
    if (f <= gamma[n - 1]) break;
    if (n > 50'000'000) throw NumericalError("gamma floor still active at t=" + std::to_string(n));
    n *= 2;
  }

  if (sched.repair) {
    for (long i = n - 1; i >= 0; --i) {
      double g = gamma[i];
      double need = gamma_floor(params, sched.target, alpha[i], A[i]);
      if (i + 1 < n) need = std::max(need, gamma[i + 1] - alpha[i]);
      if (need > g) {
        g = need;
        // guard the increment inequality against rounding in the subtraction
        while (i + 1 < n && gamma[i + 1] - g > alpha[i])
          g = std::nextafter(g, std::numeric_limits<double>::infinity());
        gamma[i] = g;
        seq.repaired_until = std::max(seq.repaired_until, i + 1);
      }
    }
  }
  alpha.resize(horizon);
  gamma.resize(horizon);
  A.resize(horizon);
  seq.alpha = std::move(alpha);
  seq.gamma = std::move(gamma);
  seq.A = std::move(A);
  seq.repaired_until = std::min(seq.repaired_until, horizon);
  return seq;
}

ScheduleReport validate_sequence(const StepSequence& seq, const GeometryParams& params,
                                 Target target) {
  ScheduleReport rep;
  rep.horizon = seq.size();
  rep.repaired_until = seq.repaired_until;
  rep.slack_min = std::numeric_limits<double>::infinity();
  rep.increment_slack_min = std::numeric_limits<double>::infinity();
  for (long t = 1; t <= seq.size(); ++t) {
    double a = seq.alpha_t(t), g = seq.gamma_t(t);
    double f = gamma_floor(params, target, a, seq.A_t(t));
    rep.slack_min = std::min(rep.slack_min, (g - f) / g);
    bool bad = g < f;
    if (t < seq.size()) {
      double inc = seq.gamma_t(t + 1) - g;
      rep.increment_slack_min = std::min(rep.increment_slack_min, (a - inc) / a);
      bad = bad || inc > a;
    }
    if (bad && !rep.first_violation) rep.first_violation = t;
  }
  rep.ok = !rep.first_violation.has_value();
  return rep;
}

ScheduleReport validate_schedule(const StepSchedule& sched, const GeometryParams& params,
                                 long horizon) {
  return validate_sequence(expand(sched, params, horizon), params, sched.target);
}

}  // namespace ccmd

namespace ccmd {

double deterministic_base(const GeometryParams& params, Target target, double alpha,
                          double gamma, double A) {
  const double k = params.kappa_ratio();
  if (target == Target::kNacsmd) return k * alpha / gamma;
  return k * std::pow(alpha, params.q) / (std::pow(A, params.q - 1.0) * gamma);
}

double deterministic_increment(const GeometryParams& params, Target target, double alpha,
                               double gamma, double A) {
  if (params.L == 0.0) return 0.0;
  double base = deterministic_base(params, target, alpha, gamma, A);
  double weight = target == Target::kNacsmd ? alpha : A;
  if (params.r == 0.0) return base <= 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return params.L * weight * std::pow(base, 1.0 / params.r);
}

double noise_increment(const GeometryParams& params, double alpha, double gamma, double moment) {
  const double p = params.p, q = params.q;
  return 2.0 * moment / (p * std::pow(params.mu, p / q)) *
         std::pow(std::pow(alpha, q) / gamma, p / q);
}

}  // namespace ccmd
