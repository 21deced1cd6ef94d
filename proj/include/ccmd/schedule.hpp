#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccmd/geometry.hpp"

namespace ccmd {

enum class Target { kNacsmd, kAcsmd };

std::string to_string(Target t);
Target parse_target(const std::string& name);

enum class ScheduleKind { kPolynomial, kCustom };

// Step-size rule. Polynomial schedules use
//   alpha_t = (t + offset + 1)^m,  gamma_t = (t + offset)^(m+1) / (m+1)
// (for m < 0, alpha_t = (t + offset)^m so that gamma increments stay below
// alpha_t). With `repair`, gamma is raised to the smallest sequence that
// satisfies the configuration inequalities; see expand().
struct StepSchedule {
  Target target = Target::kNacsmd;
  ScheduleKind kind = ScheduleKind::kPolynomial;
  double m = 0.0;
  double offset = 0.0;
  std::vector<double> custom_alpha;
  std::vector<double> custom_gamma;
  double safety_scale = 1.0;
  bool repair = true;
};

// Materialized sequences; index i holds t = i + 1.
struct StepSequence {
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> A;
  long repaired_until = 0;  // last t whose gamma was raised by the repair

  long size() const { return static_cast<long>(alpha.size()); }
  double alpha_t(long t) const { return alpha[t - 1]; }
  double gamma_t(long t) const { return gamma[t - 1]; }
  double A_t(long t) const { return t == 0 ? 0.0 : A[t - 1]; }
};

StepSchedule polynomial_schedule(Target target, double m, double offset, bool repair = true);
StepSchedule custom_schedule(Target target, std::vector<double> alpha, std::vector<double> gamma);

double default_degree(const GeometryParams& params, Target target);
double default_offset(const GeometryParams& params, Target target, double m);
StepSchedule default_schedule(const GeometryParams& params, Target target);

// Right-hand side of the gamma floor: (2M/mu) alpha_t for NACSMD,
// (2M/mu) alpha_t^q / A_t^(q-1) for ACSMD.
double gamma_floor(const GeometryParams& params, Target target, double alpha, double A);

// Sequences for t = 1..horizon. The repair takes
//   gamma_t = max(gamma_t, floor_t, gamma_{t+1} - alpha_t)
// in a backward pass from a point past the last active floor, so the values
// on 1..horizon do not depend on horizon.
StepSequence expand(const StepSchedule& sched, const GeometryParams& params, long horizon);

struct ScheduleReport {
  bool ok = true;
  std::optional<long> first_violation;
  // min over t of (gamma_t - floor_t) / gamma_t
  double slack_min = 0.0;
  // min over t < horizon of (alpha_t - (gamma_{t+1} - gamma_t)) / alpha_t
  double increment_slack_min = 0.0;
  long horizon = 0;
  long repaired_until = 0;
};

ScheduleReport validate_sequence(const StepSequence& seq, const GeometryParams& params,
                                 Target target);
ScheduleReport validate_schedule(const StepSchedule& sched, const GeometryParams& params,
                                 long horizon);

}  // namespace ccmd

namespace ccmd {

// Per-step pieces of the convergence certificate that depend only on the
// schedule. The deterministic increment is
//   L alpha (2M alpha / (mu gamma))^(1/r)                     (NACSMD)
//   L A (2M alpha^q / (mu A^(q-1) gamma))^(1/r)               (ACSMD)
// and is 0 when r = 0 and the base is <= 1 (+inf if the base exceeds 1).
double deterministic_increment(const GeometryParams& params, Target target, double alpha,
                               double gamma, double A);
// Base of the power above; a valid schedule keeps it <= 1.
double deterministic_base(const GeometryParams& params, Target target, double alpha,
                          double gamma, double A);
// 2 m / (p mu^(p/q)) (alpha^q / gamma)^(p/q) for a p-th moment m.
double noise_increment(const GeometryParams& params, double alpha, double gamma, double moment);

}  // namespace ccmd
