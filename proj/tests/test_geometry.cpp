#include <gtest/gtest.h>

#include <cmath>

#include "ccmd/errors.hpp"
#include "ccmd/geometry.hpp"
#include "ccmd/rng.hpp"

using namespace ccmd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(v.size());
  int i = 0;
  for (double e : v) x[i++] = e;
  return x;
}

DifferentiableFunction power_fn(double mu, double q) {
  Regularizer H{mu, q};
  return {[H](const Vector& x) { return evaluate(H, x); },
          [H](const Vector& x) { return grad(H, x); }};
}

}  // namespace

TEST(DeriveParams, SmoothCaseUsesZeroToZero) {
  auto p = derive_params(2, 2, 1, 1);
  EXPECT_EQ(p.r, 0.0);
  EXPECT_EQ(p.M, 1.0);
  EXPECT_EQ(p.p, 2.0);
}

TEST(DeriveParams, QuarticQuadratic) {
  auto p = derive_params(4, 2, 1, 1);
  EXPECT_DOUBLE_EQ(p.r, 1.0);
  EXPECT_DOUBLE_EQ(p.M, 0.25);
  EXPECT_DOUBLE_EQ(p.p, 4.0 / 3.0);
}

TEST(DeriveParams, CubicHolder) {
  auto p = derive_params(3, 1.5, 2, 0.5);
  EXPECT_DOUBLE_EQ(p.r, 1.0);
  EXPECT_NEAR(p.M, 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.p, 1.5);
}

TEST(DeriveParams, RejectsDomainViolations) {
  try {
    derive_params(1.5, 1.5, 1, 1);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "q");
  }
  EXPECT_THROW(derive_params(2, 2.5, 1, 1), ParameterError);
  EXPECT_THROW(derive_params(2, 1.0, 1, 1), ParameterError);
  EXPECT_THROW(derive_params(2, 2, -1, 1), ParameterError);
  try {
    derive_params(2, 2, 1, 0);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "mu");
  }
}

TEST(DeriveParams, ZeroROnlyWhenKappaEqualsQ) {
  for (double q : {2.0, 2.5, 3.0, 4.0})
    for (double k : {1.2, 1.5, 2.0}) {
      auto p = derive_params(q, k, 1.3, 1);
      EXPECT_GE(p.M * p.q, 0.0);
      EXPECT_EQ(p.r == 0.0, k == q);
    }
}

TEST(Norms, Examples) {
  EXPECT_DOUBLE_EQ(lq_norm(vec({3, 4}), 2), 5.0);
  EXPECT_NEAR(lq_norm(vec({1, 1, 1, 1}), 4), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(dual_norm(vec({1, 0}), 4), 1.0);
  EXPECT_NEAR(dual_norm(vec({1, 1}), 4), std::pow(2.0, 0.75), 1e-15);
  EXPECT_THROW(lq_norm(vec({NAN}), 2), ParameterError);
}

TEST(Bregman, Examples) {
  EXPECT_DOUBLE_EQ(bregman(Regularizer{1, 2}, vec({1, 0}), vec({0, 0})), 0.5);
  EXPECT_DOUBLE_EQ(bregman(Regularizer{2, 4}, vec({1.3, -2}), vec({1.3, -2})), 0.0);
  EXPECT_DOUBLE_EQ(bregman(Regularizer{2, 4}, vec({1}), vec({-1})), 4.0);
}

TEST(Bregman, MatchesFiniteDifferenceDefinition) {
  // omega(x) - omega(y) - <grad, x - y> with a central-difference gradient
  Regularizer H{2, 4};
  Vector x = vec({1}), y = vec({-1});
  double h = 1e-6;
  double fd = (evaluate(H, y + vec({h})) - evaluate(H, y - vec({h}))) / (2 * h);
  double expect = evaluate(H, x) - evaluate(H, y) - fd * (x[0] - y[0]);
  EXPECT_NEAR(bregman(H, x, y), expect, 1e-6);
}

TEST(Bregman, NonnegativeAndUniformlyConvex) {
  Rng rng = make_stream(5, 0);
  for (double q : {2.0, 2.5, 3.0, 4.0}) {
    Regularizer H{1.7, q};
    double c = uniform_convexity_constant(q);
    for (int i = 0; i < 2000; ++i) {
      Vector x = uniform_vector(rng, 3, -2, 2), y = uniform_vector(rng, 3, -2, 2);
      double d = bregman(H, x, y);
      EXPECT_GE(d, 0.0);
      EXPECT_GE(d, c * H.mu / q * std::pow(lq_norm(x - y, q), q) * (1 - 1e-9));
    }
  }
}

TEST(Bregman, DenseGridLowerBoundOneDimensional) {
  for (double q : {2.5, 3.0, 4.0}) {
    Regularizer H{1.0, q};
    double c = effective_uniform_convexity(1.0, q);
    for (int i = -200; i <= 200; ++i)
      for (int j = -200; j <= 200; ++j) {
        double a = i / 50.0, b = j / 50.0;
        if (i == j) continue;
        double lhs = bregman(H, vec({a}), vec({b}));
        EXPECT_GE(lhs + 1e-12, c / q * std::pow(std::abs(a - b), q)) << a << " " << b;
      }
  }
}

TEST(UniformConvexityConstant, FrozenValues) {
  // Independent values: c_3 = 2 - sqrt(2) and c_4 = 1/3 (attained at t = -2)
  // from the closed-form ratio; c_2.5 from a 1e6-point grid in Python.
  EXPECT_DOUBLE_EQ(uniform_convexity_constant(2.0), 1.0);
  EXPECT_NEAR(uniform_convexity_constant(3.0), 2.0 - std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(uniform_convexity_constant(4.0), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(uniform_convexity_constant(2.5), 0.76802, 1e-5);
}

TEST(CheckUniformConvexity, HalfSquaredIsStronglyConvex) {
  auto rep = check_uniform_convexity(power_fn(1, 2), 3, 2, 1.0, 2000, 1);
  EXPECT_NEAR(rep.min_ratio, 1.0, 1e-9);
  EXPECT_TRUE(rep.holds);
}

TEST(CheckUniformConvexity, QuarticConstantIsBelowOne) {
  auto rep = check_uniform_convexity(power_fn(1, 4), 1, 4, 1.0, 20000, 2);
  EXPECT_GT(rep.min_ratio, 0.0);
  EXPECT_FALSE(rep.holds);
  EXPECT_GE(rep.min_ratio, uniform_convexity_constant(4.0) - 1e-12);
  EXPECT_LT(rep.min_ratio, 0.34);
  auto calibrated = check_uniform_convexity(power_fn(1, 4), 1, 4,
                                            effective_uniform_convexity(1, 4), 20000, 2);
  EXPECT_TRUE(calibrated.holds);
}

TEST(CheckUniformConvexity, LinearHasNoCurvature) {
  DifferentiableFunction lin{[](const Vector& x) { return 2 * x.sum(); },
                             [](const Vector& x) { return Vector::Constant(x.size(), 2.0); }};
  auto rep = check_uniform_convexity(lin, 2, 3, 1.0, 500, 3);
  EXPECT_NEAR(rep.min_ratio, 0.0, 1e-12);
}

TEST(CheckWeakSmoothness, RidgeQuadratic) {
  Vector xs = vec({0.3, -0.2, 0.5, 0.1});
  DifferentiableFunction F{[xs](const Vector& x) { return (x - xs).squaredNorm() / 3; },
                           [xs](const Vector& x) { return Vector(2.0 / 3 * (x - xs)); }};
  auto l2 = check_weak_smoothness(F, 4, 2, 2.0 / 3, 2000, 4);
  EXPECT_NEAR(l2.max_ratio, 2.0 / 3, 1e-9);
  EXPECT_TRUE(l2.holds);

  Vector x16 = Vector::Zero(16);
  DifferentiableFunction F16{[x16](const Vector& x) { return (x - x16).squaredNorm() / 3; },
                             [x16](const Vector& x) { return Vector(2.0 / 3 * (x - x16)); }};
  double Lq = 2.0 / 3 * std::pow(16.0, 1 - 2.0 / 4);
  auto l4 = check_weak_smoothness(F16, 16, 2, Lq, 5000, 5, 4.0);
  EXPECT_TRUE(l4.holds);
  EXPECT_LE(l4.max_ratio, Lq);
}

TEST(CheckWeakSmoothness, LinearIsZero) {
  DifferentiableFunction lin{[](const Vector& x) { return x.sum(); },
                             [](const Vector& x) { return Vector::Constant(x.size(), 1.0); }};
  for (double k : {1.3, 2.0}) EXPECT_NEAR(check_weak_smoothness(lin, 3, k, 0.0, 300, 6).max_ratio, 0.0, 1e-12);
}

TEST(YoungGapBound, Examples) {
  auto p = derive_params(4, 2, 1, 1);
  Vector x = vec({0.3, 0.2});
  EXPECT_DOUBLE_EQ(young_gap_bound(p, x, x, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(young_gap_bound(p, vec({1}), vec({0}), 1.0), 1.0625);
  EXPECT_THROW(young_gap_bound(p, x, x, 0.0), ParameterError);
}

TEST(YoungGapBound, DominatesHolderTerm) {
  Rng rng = make_stream(7, 0);
  for (auto [q, k] : {std::pair{3.0, 1.5}, {4.0, 2.0}, {2.0, 2.0}, {2.5, 1.2}}) {
    auto p = derive_params(q, k, 1.7, 1);
    long violations = 0;
    for (int i = 0; i < 10000; ++i) {
      Vector x = uniform_vector(rng, 1, 0, std::exp(uniform(rng, -5, 3)));
      Vector y = Vector::Zero(1);
      double delta = std::exp(uniform(rng, -8, 4));
      double lhs = p.L / k * std::pow(lq_norm(x - y, q), k);
      if (lhs > young_gap_bound(p, x, y, delta) * (1 + 1e-12)) ++violations;
    }
    EXPECT_EQ(violations, 0) << q << " " << k;
  }
}

TEST(Gradients, MatchCentralDifferences) {
  Rng rng = make_stream(8, 0);
  for (double q : {2.0, 2.5, 3.0, 4.0}) {
    Regularizer H{1.3, q};
    for (int i = 0; i < 100; ++i) {
      Vector x = uniform_vector(rng, 3, -2, 2);
      Vector g = grad(H, x);
      for (int j = 0; j < 3; ++j) {
        double h = 1e-5 * std::max(1.0, std::abs(x[j]));
        Vector e = Vector::Zero(3);
        e[j] = h;
        double fd = (evaluate(H, x + e) - evaluate(H, x - e)) / (2 * h);
        EXPECT_NEAR(fd, g[j], 1e-6 * std::max(1.0, std::abs(g[j])));
      }
    }
  }
}
