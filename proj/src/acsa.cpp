#include <cmath>

#include "ccmd/errors.hpp"
#include "ccmd/solvers.hpp"

namespace ccmd {

AcsaStage acsa_stage(const AcsaConfig& cfg, int k) {
  const double s2 = cfg.sigma * cfg.sigma;
  double n = std::max(4.0 * std::sqrt(2.0 * cfg.L / cfg.mu),
                      128.0 * s2 / (3.0 * cfg.mu * cfg.V0 * std::pow(2.0, -(k + 1))));
  AcsaStage st;
  // Saturate instead of overflowing; such a stage never finishes anyway.
  st.N = n >= 1e15 ? static_cast<long>(1e15) : std::max<long>(1, static_cast<long>(std::ceil(n)));
  const double N = static_cast<double>(st.N);
  st.nu = std::max(2.0 * cfg.L, std::sqrt(cfg.mu * s2 * N * (N + 1.0) * (N + 2.0) /
                                          (3.0 * cfg.V0 * std::pow(2.0, -(k - 1)))));
  return st;
}

SolveResult acsa_baseline(const Oracle& oracle, const Regularizer& H, const AcsaConfig& cfg,
                          const Vector& x1, Rng& rng, const TraceOptions& opts) {
  if (!(cfg.mu > 0.0)) throw ParameterError("mu", "must be > 0");
  if (!(cfg.L >= 0.0)) throw ParameterError("L", "must be >= 0");
  if (!(cfg.V0 > 0.0)) throw ParameterError("V0", "must be > 0");
  if (cfg.max_iterations < 1) throw ParameterError("max_iterations", "must be >= 1");
  if (x1.size() != oracle.dimension()) throw ParameterError("x1", "dimension mismatch");

  const double mu = cfg.mu;
  const bool with_noise = oracle.has_mean_gradient();
  SolveResult res;
  res.trace.thin = opts.thin;
  Vector p = x1;
  long done = 0;
  for (int k = 1; done < cfg.max_iterations; ++k) {
    const AcsaStage st = acsa_stage(cfg, k);
    Vector x = p, ag = p;
    long local = 0;
    for (long t = 1; t <= st.N && done < cfg.max_iterations; ++t) {
      const double a = 2.0 / (t + 1.0);
      const double g = 4.0 * st.nu / (t * (t + 1.0));
      const double den = g + (1.0 - a * a) * mu;
      Vector md = ((1.0 - a) * (mu + g) / den) * ag + (a * ((1.0 - a) * mu + g) / den) * x;
      Vector G = oracle.sample_gradient(md, rng);
      // argmin a[<G,z> + (mu/2)|z - md|^2 + H(z)] + (c/2)|z - x|^2
      const double c = (1.0 - a) * mu + g;
      const double quad = a * mu + c;
      Vector v = (c * x + a * mu * md - a * G) / quad;
      Vector xn = euclidean_prox(H, v, a, quad);
      if (!xn.allFinite()) throw NumericalError("non-finite iterate", done + t);
      ag = a * xn + (1.0 - a) * ag;
      ++done;
      ++local;
      if (opts.record && (done - 1) % opts.thin == 0) {
        IterationRecord rec;
        rec.stage = k - 1;
        rec.t = t;
        rec.alpha = a;
        rec.gamma = g;
        rec.x = x;
        rec.x_query = md;
        rec.x_next = xn;
        rec.x_avg = ag;
        if (with_noise) rec.noise = G - oracle.mean_gradient(md);
        rec.gradient = std::move(G);
        res.trace.records.push_back(std::move(rec));
      }
      x = std::move(xn);
      if (opts.observer && opts.observer(done, x, ag)) {
        res.stopped = true;
        break;
      }
    }
    res.trace.stages.push_back(StageInfo{p, x, ag, local});
    res.x_last = x;
    res.x_avg = ag;
    if (res.stopped) break;
    p = ag;
  }
  res.iterations = done;
  return res;
}

}  // namespace ccmd
