#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ccmd/oracles.hpp"
#include "ccmd/regularizer.hpp"
#include "ccmd/rng.hpp"
#include "ccmd/schedule.hpp"

namespace ccmd {

struct IterationRecord {
  int stage = 0;
  long t = 0;  // local index within the stage, starting at 1
  double alpha = 0.0;
  double gamma = 0.0;
  double A = 0.0;
  Vector x;         // prox center x_t
  Vector x_query;   // point where the oracle was called (x_t^md for ACSMD)
  Vector x_next;    // x_{t+1}
  Vector x_avg;     // x_{t+1}^ag
  Vector gradient;  // G(x_query, xi_t)
  Vector noise;     // G - grad F(x_query); empty when the oracle hides grad F
};

struct StageInfo {
  Vector start;
  Vector end_last;
  Vector end_avg;
  long iterations = 0;
};

struct RunTrace {
  Target algorithm = Target::kNacsmd;
  std::vector<IterationRecord> records;
  std::vector<StageInfo> stages;
  StepSequence sequence;
  long thin = 1;
};

// Called after each iteration with the global iteration count. Returning
// true stops the run.
using Observer = std::function<bool(long global_t, const Vector& x_next, const Vector& x_avg)>;

struct TraceOptions {
  bool record = true;
  long thin = 1;  // keep every thin-th record; certificates need thin == 1
  Observer observer;
};

struct SolveResult {
  Vector x_last;
  Vector x_avg;
  long iterations = 0;
  bool stopped = false;
  RunTrace trace;
};

// Core loops over an already materialized sequence of length >= T.
SolveResult run_nacsmd(const Oracle& oracle, const Regularizer& H, const StepSequence& seq,
                       const Vector& x1, long T, Rng& rng, const TraceOptions& opts = {});
SolveResult run_acsmd(const Oracle& oracle, const Regularizer& H, const StepSequence& seq,
                      const Vector& x1, long T, Rng& rng, const TraceOptions& opts = {});

// Expand and validate the schedule, then run. Invalid schedules throw.
SolveResult nacsmd(const Oracle& oracle, const Regularizer& H, const StepSchedule& sched,
                   const GeometryParams& params, const Vector& x1, long T, Rng& rng,
                   const TraceOptions& opts = {});
SolveResult acsmd(const Oracle& oracle, const Regularizer& H, const StepSchedule& sched,
                  const GeometryParams& params, const Vector& x1, long T, Rng& rng,
                  const TraceOptions& opts = {});

struct RestartPlan {
  long n = 0;  // halving stages
  long K = 1;  // iterations per halving stage
  long T = 1;  // final stage iterations
  // How K and T were sized, for reports.
  double K1 = 0.0;
  double exponent = 1.0;     // m + 1
  double constant_c = 0.0;   // K1 / (L/mu)^(...)
  bool T_capped = false;
};

// n = ceil(log2(V0/eps)), K = ceil((2 K1)^(1/(m+1))) with
// K1 = sup_T gamma_1 T^(m+1) (1/A_T + 1/gamma_T) from the explicit sequence,
// T = max(K, first T where the deterministic and noise terms of the
// expectation bound, divided by A_T, drop below eps), capped at T_cap.
RestartPlan plan_from_params(const GeometryParams& params, const StepSchedule& sched,
                             double V0, double epsilon, long T_cap = 1'000'000);
RestartPlan plan_from_params(const GeometryParams& params, Target target, double V0,
                             double epsilon, long T_cap = 1'000'000);

// n stages of K iterations, each restarted from the last (not averaged)
// iterate, then a final stage of T iterations. Records carry the stage index;
// the observer sees the cumulative iteration count.
SolveResult restart(Target algorithm, const Oracle& oracle, const Regularizer& H,
                    const StepSequence& seq, const Vector& x1, const RestartPlan& plan, Rng& rng,
                    const TraceOptions& opts = {});

// Multi-stage accelerated stochastic approximation for strongly convex
// composite problems in Euclidean geometry, used as a reference method.
struct AcsaConfig {
  double mu = 1.0;      // strong convexity of the smooth part w.r.t. l2
  double L = 1.0;       // smoothness of the smooth part w.r.t. l2
  double sigma = 0.0;   // gradient noise level
  double V0 = 1.0;      // bound on the initial optimality gap
  long max_iterations = 1000;
};

struct AcsaStage {
  long N = 0;
  double nu = 0.0;
};

AcsaStage acsa_stage(const AcsaConfig& cfg, int k);

SolveResult acsa_baseline(const Oracle& oracle, const Regularizer& H, const AcsaConfig& cfg,
                          const Vector& x1, Rng& rng, const TraceOptions& opts = {});

}  // namespace ccmd
