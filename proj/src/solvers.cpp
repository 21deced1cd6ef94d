#include "ccmd/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccmd/errors.hpp"

namespace ccmd {

namespace {

struct StageOutcome {
  Vector x_last;
  Vector x_avg;
  long iterations = 0;
  bool stopped = false;
};

// One run of Algorithm "non-accelerated" or "accelerated" over t = 1..T.
StageOutcome run_stage(bool accelerated, const Oracle& oracle, const Regularizer& H,
                       const StepSequence& seq, const Vector& x1, long T, Rng& rng,
                       const TraceOptions& opts, int stage, long global_offset,
                       RunTrace& trace) {
  if (T < 1) throw ParameterError("T", "must be >= 1");
  if (seq.size() < T) throw ParameterError("T", "exceeds the materialized schedule");
  if (x1.size() != oracle.dimension()) throw ParameterError("x1", "dimension mismatch");
  if (!x1.allFinite()) throw ParameterError("x1", "non-finite entry");

  const bool with_noise = oracle.has_mean_gradient();
  StageOutcome out;
  Vector x = x1;
  Vector avg = x1;
  Vector query;
  for (long t = 1; t <= T; ++t) {
    const double a = seq.alpha_t(t), g = seq.gamma_t(t);
    const double A = seq.A_t(t), A_prev = seq.A_t(t - 1);
    const double w_old = A_prev / A, w_new = a / A;
    query = accelerated ? Vector(w_old * avg + w_new * x) : x;
    Vector G = oracle.sample_gradient(query, rng);
    Vector x_next = composite_prox(H, G, x, a, g);
    if (!x_next.allFinite()) throw NumericalError("non-finite iterate", global_offset + t);
    avg = w_old * avg + w_new * x_next;

    if (opts.record && (t - 1) % opts.thin == 0) {
      IterationRecord rec;
      rec.stage = stage;
      rec.t = t;
      rec.alpha = a;
      rec.gamma = g;
      rec.A = A;
      rec.x = x;
      rec.x_query = query;
      rec.x_next = x_next;
      rec.x_avg = avg;
      if (with_noise) rec.noise = G - oracle.mean_gradient(query);
      rec.gradient = std::move(G);
      trace.records.push_back(std::move(rec));
    }
    x = std::move(x_next);
    out.iterations = t;
    if (opts.observer && opts.observer(global_offset + t, x, avg)) {
      out.stopped = true;
      break;
    }
  }
  trace.stages.push_back(StageInfo{x1, x, avg, out.iterations});
  out.x_last = std::move(x);
  out.x_avg = std::move(avg);
  return out;
}

SolveResult single(bool accelerated, const Oracle& oracle, const Regularizer& H,
                   const StepSequence& seq, const Vector& x1, long T, Rng& rng,
                   const TraceOptions& opts) {
  if (opts.thin < 1) throw ParameterError("thin", "must be >= 1");
  SolveResult res;
  res.trace.algorithm = accelerated ? Target::kAcsmd : Target::kNacsmd;
  res.trace.thin = opts.thin;
  res.trace.sequence = seq;
  StageOutcome o = run_stage(accelerated, oracle, H, seq, x1, T, rng, opts, 0, 0, res.trace);
  res.x_last = std::move(o.x_last);
  res.x_avg = std::move(o.x_avg);
  res.iterations = o.iterations;
  res.stopped = o.stopped;
  return res;
}

StepSequence checked_sequence(const StepSchedule& sched, const GeometryParams& params, long T,
                              Target expected) {
  if (sched.target != expected)
    throw ParameterError("schedule", "built for " + to_string(sched.target));
  StepSequence seq = expand(sched, params, T);
  ScheduleReport rep = validate_sequence(seq, params, sched.target);
  if (!rep.ok)
    throw ParameterError("schedule", "configuration inequalities fail at t=" +
                                         std::to_string(*rep.first_violation));
  return seq;
}

}  // namespace

SolveResult run_nacsmd(const Oracle& oracle, const Regularizer& H, const StepSequence& seq,
                       const Vector& x1, long T, Rng& rng, const TraceOptions& opts) {
  return single(false, oracle, H, seq, x1, T, rng, opts);
}

SolveResult run_acsmd(const Oracle& oracle, const Regularizer& H, const StepSequence& seq,
                      const Vector& x1, long T, Rng& rng, const TraceOptions& opts) {
  return single(true, oracle, H, seq, x1, T, rng, opts);
}

SolveResult nacsmd(const Oracle& oracle, const Regularizer& H, const StepSchedule& sched,
                   const GeometryParams& params, const Vector& x1, long T, Rng& rng,
                   const TraceOptions& opts) {
  return run_nacsmd(oracle, H, checked_sequence(sched, params, T, Target::kNacsmd), x1, T, rng,
                    opts);
}

SolveResult acsmd(const Oracle& oracle, const Regularizer& H, const StepSchedule& sched,
                  const GeometryParams& params, const Vector& x1, long T, Rng& rng,
                  const TraceOptions& opts) {
  return run_acsmd(oracle, H, checked_sequence(sched, params, T, Target::kAcsmd), x1, T, rng,
                   opts);
}

RestartPlan plan_from_params(const GeometryParams& params, const StepSchedule& sched, double V0,
                             double epsilon, long T_cap) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon", "must be > 0");
  if (!(V0 > 0.0)) throw ParameterError("V0", "must be > 0");
  if (sched.kind != ScheduleKind::kPolynomial)
    throw ParameterError("schedule", "restart sizing needs a polynomial schedule");
  if (T_cap < 1) throw ParameterError("T_cap", "must be >= 1");

  RestartPlan plan;
  plan.n = V0 > epsilon ? static_cast<long>(std::ceil(std::log2(V0 / epsilon))) : 0;
  plan.exponent = sched.m + 1.0;

  const long scan = std::max<long>(T_cap, 1L << 18);
  StepSequence seq = expand(sched, params, scan);
  const double g1 = seq.gamma_t(1);
  double K1 = 0.0;
  for (long T = 1; T <= scan; ++T) {
    double v = g1 * std::pow(static_cast<double>(T), plan.exponent) *
               (1.0 / seq.A_t(T) + 1.0 / seq.gamma_t(T));
    K1 = std::max(K1, v);
  }
  plan.K1 = K1;
  plan.K = std::max<long>(1, static_cast<long>(std::ceil(std::pow(2.0 * K1, 1.0 / plan.exponent))));
  if (params.L > 0.0) {
    double ratio = params.L / params.mu;
    double power = sched.target == Target::kNacsmd ? plan.exponent : plan.exponent / params.q;
    plan.constant_c = K1 / std::pow(ratio, power);
  }

  const double moment = std::pow(params.sigma, params.p);
  double det = 0.0, noise = 0.0;
  long need = -1;
  for (long T = 1; T <= T_cap; ++T) {
    double a = seq.alpha_t(T), g = seq.gamma_t(T), A = seq.A_t(T);
    det += deterministic_increment(params, sched.target, a, g, A);
    noise += noise_increment(params, a, g, moment);
    if ((det + noise) / A <= epsilon) {
      need = T;
      break;
    }
  }
  if (need < 0) {
    need = T_cap;
    plan.T_capped = true;
  }
  plan.T = std::max(plan.K, need);
  return plan;
}

RestartPlan plan_from_params(const GeometryParams& params, Target target, double V0,
                             double epsilon, long T_cap) {
  return plan_from_params(params, default_schedule(params, target), V0, epsilon, T_cap);
}

SolveResult restart(Target algorithm, const Oracle& oracle, const Regularizer& H,
                    const StepSequence& seq, const Vector& x1, const RestartPlan& plan, Rng& rng,
                    const TraceOptions& opts) {
  if (plan.n < 0 || plan.K < 1 || plan.T < 1) throw ParameterError("plan", "invalid restart plan");
  if (opts.thin < 1) throw ParameterError("thin", "must be >= 1");
  const bool acc = algorithm == Target::kAcsmd;
  SolveResult res;
  res.trace.algorithm = algorithm;
  res.trace.thin = opts.thin;
  res.trace.sequence = seq;
  Vector start = x1;
  long done = 0;
  for (long k = 0; k <= plan.n; ++k) {
    const long len = k < plan.n ? plan.K : plan.T;
    StageOutcome o = run_stage(acc, oracle, H, seq, start, len, rng, opts, static_cast<int>(k),
                               done, res.trace);
    done += o.iterations;
    res.x_last = o.x_last;
    res.x_avg = o.x_avg;
    if (o.stopped) {
      res.stopped = true;
      break;
    }
    start = std::move(o.x_last);
  }
  res.iterations = done;
  return res;
}

}  // namespace ccmd
