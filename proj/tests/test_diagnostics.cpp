#include <gtest/gtest.h>

#include <cmath>

#include "ccmd/diagnostics.hpp"
#include "ccmd/errors.hpp"

using namespace ccmd;

namespace {

RidgeInstance ridge(int d, double q, double mu, std::uint64_t seed = 8) {
  Rng rng = make_stream(seed, 0);
  return make_ridge_instance(d, q, mu, 0.0, uniform_vector(rng, d, -1, 1));
}

std::shared_ptr<const Oracle> noisy(const RidgeInstance& inst, NoiseModel noise) {
  noise.q = inst.q;
  return additive_noise_oracle(
      inst.d, [inst](const Vector& x) { return inst.mean_gradient(x); }, noise,
      [inst](const Vector& x) { return inst.evaluate_F(x); });
}

}  // namespace

TEST(ExactOptimum, ClosedFormCases) {
  auto inst = ridge(5, 2, 2);
  auto opt = exact_optimum(inst);
  // (2/3)(x - x*) + 2x = 0  =>  x = x*/4
  EXPECT_LE((opt.x - inst.x_star / 4).lpNorm<Eigen::Infinity>(), 1e-15);
  auto free = ridge(5, 4, 0);
  EXPECT_EQ(exact_optimum(free).x, free.x_star);
  EXPECT_EQ(exact_optimum(free).psi, 0.0);
}

TEST(ExactOptimum, FirstOrderResidualAndGrid) {
  for (double q : {2.5, 3.0, 4.0}) {
    auto inst = ridge(6, q, 1.3);
    auto opt = exact_optimum(inst);
    Vector res = inst.mean_gradient(opt.x) + grad(Regularizer{inst.mu, q}, opt.x);
    EXPECT_LE(res.lpNorm<Eigen::Infinity>(), 1e-10);
    // No grid point along any coordinate does better.
    for (int j = 0; j < 6; ++j)
      for (int i = -1000; i <= 1000; ++i) {
        Vector y = opt.x;
        y[j] = i / 1000.0;
        EXPECT_GE(ridge_psi(inst, y), opt.psi - 1e-14);
      }
  }
}

TEST(ExactOptimum, ClampsToBox) {
  Vector xs(2);
  xs << 3.0, -0.1;
  auto inst = make_ridge_instance(2, 2, 0.0, 0.0, xs, 1.0);
  auto opt = exact_optimum(inst);
  EXPECT_EQ(opt.x[0], 1.0);
  EXPECT_EQ(opt.x[1], -0.1);
}

TEST(Certificate, NoiselessRunsHaveZeroStochasticTerms) {
  auto inst = ridge(4, 2, 1);
  auto oracle = noisy(inst, NoiseModel{});
  auto params = derive_params(2, 2, inst.L(), effective_uniform_convexity(1, 2));
  Regularizer H = make_regularizer(1, 2);
  auto opt = exact_optimum(inst);
  auto psi = [&](const Vector& x) { return ridge_psi(inst, x); };
  for (Target tgt : {Target::kNacsmd, Target::kAcsmd}) {
    Rng rng = make_stream(0, 0);
    auto sched = default_schedule(params, tgt);
    auto res = tgt == Target::kAcsmd
                   ? acsmd(*oracle, H, sched, params, Vector::Constant(4, 2.0), 300, rng)
                   : nacsmd(*oracle, H, sched, params, Vector::Constant(4, 2.0), 300, rng);
    auto rep = certificate_check(res.trace, params, H, psi, opt.x);
    EXPECT_TRUE(rep.ok);
    EXPECT_EQ(rep.rows.size(), 300u);
    for (const auto& row : rep.rows) {
      EXPECT_EQ(row.martingale, 0.0);
      EXPECT_EQ(row.noise_moment, 0.0);
      EXPECT_EQ(row.deterministic, 0.0);
    }
  }
}

TEST(Certificate, HoldsPathwiseUnderGaussianNoise) {
  for (double q : {2.0, 4.0}) {
    auto inst = ridge(4, q, 2);
    auto oracle = noisy(inst, NoiseModel{NoiseKind::kGaussian, 0.5});
    auto params = derive_params(q, 2, inst.L(), effective_uniform_convexity(2, q), 0.5);
    Regularizer H = make_regularizer(2, q);
    auto opt = exact_optimum(inst);
    auto psi = [&](const Vector& x) { return ridge_psi(inst, x); };
    for (Target tgt : {Target::kNacsmd, Target::kAcsmd}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng = make_stream(seed, 0);
        auto sched = default_schedule(params, tgt);
        auto res = tgt == Target::kAcsmd
                       ? acsmd(*oracle, H, sched, params, Vector::Constant(4, 3.0), 500, rng)
                       : nacsmd(*oracle, H, sched, params, Vector::Constant(4, 3.0), 500, rng);
        auto rep = certificate_check(res.trace, params, H, psi, opt.x);
        EXPECT_TRUE(rep.ok) << "q=" << q << " " << to_string(tgt) << " seed=" << seed
                            << " slack=" << rep.min_scaled_slack;
      }
    }
  }
}

TEST(Certificate, DetectsAForgedIterate) {
  auto inst = ridge(3, 2, 1);
  auto oracle = noisy(inst, NoiseModel{NoiseKind::kGaussian, 0.1});
  auto params = derive_params(2, 2, inst.L(), 1.0 - 1e-9, 0.1);
  Regularizer H = make_regularizer(1, 2);
  Rng rng = make_stream(0, 0);
  auto res = nacsmd(*oracle, H, default_schedule(params, Target::kNacsmd), params,
                    Vector::Constant(3, 2.0), 50, rng);
  res.trace.records[20].x_avg += Vector::Constant(3, 5.0);
  auto psi = [&](const Vector& x) { return ridge_psi(inst, x); };
  auto rep = certificate_check(res.trace, params, H, psi, exact_optimum(inst).x);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.violations, 1);
  EXPECT_LT(rep.min_scaled_slack, 0.0);
}

TEST(Certificate, NeedsAFullTraceWithNoise) {
  auto inst = ridge(2, 2, 1);
  auto params = derive_params(2, 2, inst.L(), 1.0 - 1e-9);
  Regularizer H = make_regularizer(1, 2);
  auto psi = [&](const Vector& x) { return ridge_psi(inst, x); };
  auto oracle = noisy(inst, NoiseModel{});
  TraceOptions thin;
  thin.thin = 5;
  Rng rng = make_stream(0, 0);
  auto res = nacsmd(*oracle, H, default_schedule(params, Target::kNacsmd), params,
                    Vector::Ones(2), 20, rng, thin);
  EXPECT_THROW(certificate_check(res.trace, params, H, psi, Vector::Zero(2)),
               DiagnosticUnavailable);
  auto hidden = ridge_oracle(inst, 1.0);
  auto res2 = nacsmd(*hidden, H, default_schedule(params, Target::kNacsmd), params,
                     Vector::Ones(2), 20, rng);
  // The ridge oracle knows its mean, so this works; an oracle that hides
  // grad F leaves the noise empty.
  EXPECT_NO_THROW(certificate_check(res2.trace, params, H, psi, Vector::Zero(2)));
  res2.trace.records[3].noise = Vector();
  EXPECT_THROW(certificate_check(res2.trace, params, H, psi, Vector::Zero(2)),
               DiagnosticUnavailable);
}

TEST(ExpectationBound, MeanGapStaysBelow) {
  auto inst = ridge(4, 4, 2);
  const double sigma = 0.3;
  auto oracle = noisy(inst, NoiseModel{NoiseKind::kGaussian, sigma});
  auto params = derive_params(4, 2, inst.L(), effective_uniform_convexity(2, 4), sigma);
  Regularizer H = make_regularizer(2, 4);
  auto opt = exact_optimum(inst);
  Vector x1 = Vector::Constant(4, 2.0);
  for (Target tgt : {Target::kNacsmd, Target::kAcsmd}) {
    const long T = 300;
    StepSequence seq = expand(default_schedule(params, tgt), params, T);
    auto bound = expectation_bound(seq, params, tgt, bregman(H, opt.x, x1));
    std::vector<double> mean(T, 0.0);
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
      Rng rng = make_stream(static_cast<std::uint64_t>(s), 0);
      auto res = tgt == Target::kAcsmd ? run_acsmd(*oracle, H, seq, x1, T, rng)
                                       : run_nacsmd(*oracle, H, seq, x1, T, rng);
      for (const auto& rec : res.trace.records)
        mean[rec.t - 1] += (ridge_psi(inst, rec.x_avg) - opt.psi) / seeds;
    }
    for (long t = 1; t <= T; ++t) EXPECT_LE(mean[t - 1], bound[t - 1]) << to_string(tgt) << " " << t;
  }
}

TEST(LowerBound, HorizonFormula) {
  // (1/(2*2)) * 1 * 20 * ln 2
  EXPECT_NEAR(lower_bound_horizon(1, 2, 1, 0.05, 0.5), 5 * std::log(2.0), 1e-12);
  EXPECT_THROW(lower_bound_horizon(1, 2, 1, 0.05, 1.0), ParameterError);
}

TEST(LowerBound, NoQueriesAlwaysFail) {
  LowerBoundConfig cfg;
  cfg.T_override = 0;
  cfg.trials = 50;
  auto rep = lower_bound_experiment(cfg);
  EXPECT_EQ(rep.empirical_failure_rate, 1.0);
  EXPECT_EQ(rep.all_zero_rate, 1.0);
}

TEST(LowerBound, DefaultHorizon) {
  LowerBoundConfig cfg;
  cfg.trials = 2000;
  auto rep = lower_bound_experiment(cfg);
  EXPECT_EQ(rep.T, 3);
  EXPECT_NEAR(rep.threshold, 0.5 - 3 * std::sqrt(0.25 / 2000), 1e-12);
  double se = std::sqrt(rep.all_zero_theory * (1 - rep.all_zero_theory) / cfg.trials);
  EXPECT_NEAR(rep.all_zero_rate, rep.all_zero_theory, 4 * se);
  // Every all-zero run outputs x = 0, whose gap is exactly epsilon.
  EXPECT_GE(rep.empirical_failure_rate, rep.all_zero_rate);
  EXPECT_TRUE(rep.ok);
}

TEST(LowerBound, RejectsLargeEpsilon) {
  LowerBoundConfig cfg;
  cfg.epsilon = 0.3;
  EXPECT_THROW(lower_bound_experiment(cfg), ParameterError);
}

TEST(TailBound, Regimes) {
  std::vector<double> beta(100, 1.0);
  const double sigma = 1.0, R = 1.0;
  const double S2 = 3.0 * std::sqrt(100.0);
  EXPECT_EQ(martingale_tail_bound(0.0, sigma, R, 2, beta), 1.0);
  EXPECT_NEAR(martingale_tail_bound(S2, sigma, R, 2, beta), std::exp(-0.25), 1e-15);
  // Past Sigma2^2/(sigma R) the bound turns linear in tau.
  double far = 2 * S2 * S2;
  EXPECT_LE(martingale_tail_bound(far, sigma, R, 2, beta), std::exp(-far / 4.0) * (1 + 1e-12));
  double a = martingale_tail_bound(10.0, sigma, R, 4, beta);
  double b = martingale_tail_bound(20.0, sigma, R, 4, beta);
  EXPECT_LE(b, a);
}

TEST(Concentration, SmallRunPasses) {
  ConcentrationConfig cfg;
  cfg.trials = 20000;
  cfg.mgf_draws = 20000;
  for (double n : {0.0, 1.0}) {
    cfg.weight_power = n;
    auto rep = concentration_check(cfg);
    EXPECT_TRUE(rep.ok);
    EXPECT_NEAR(rep.mgf, 2.0, 1e-9);
    EXPECT_EQ(rep.tails.size(), 10u);
    EXPECT_EQ(rep.tails[0].bound, 1.0);
  }
}

TEST(Concentration, RejectsUncalibratedNoise) {
  ConcentrationConfig cfg;
  cfg.noise = NoiseKind::kPareto;
  EXPECT_THROW(concentration_check(cfg), ParameterError);
  cfg.noise = NoiseKind::kGaussian;
  EXPECT_THROW(concentration_check(cfg), ParameterError);
}
