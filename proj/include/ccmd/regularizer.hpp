#pragma once

#include <limits>

#include "ccmd/types.hpp"

namespace ccmd {

// H(x) = (mu/q) * sum |x_j|^q, also used as the distance-generating function.
// An optional coordinate box [-box, box]^d restricts the prox step.
struct Regularizer {
  double mu = 1.0;
  double q = 2.0;
  double box = std::numeric_limits<double>::infinity();

  bool boxed() const { return box < std::numeric_limits<double>::infinity(); }
};

Regularizer make_regularizer(double mu, double q,
                             double box = std::numeric_limits<double>::infinity());

double evaluate(const Regularizer& H, const Vector& x);
Vector grad(const Regularizer& H, const Vector& x);

// Scalar helper: mu * |x|^(q-1) * sign(x).
double power_grad(double x, double mu, double q);

// argmin_x alpha*(<g,x> + H(x)) + gamma*D^H(x, y), solved coordinate-wise.
Vector composite_prox(const Regularizer& H, const Vector& g, const Vector& y,
                      double alpha, double gamma);

// Same minimizer found by bracketing + bisection on the scalar first-order
// condition. Independent of the closed form; used as a test oracle.
Vector prox_bisection_oracle(const Regularizer& H, const Vector& g, const Vector& y,
                             double alpha, double gamma, double tol);

// argmin_x weight*H(x) + (quad/2)*||x - v||_2^2, coordinate-wise. Euclidean
// prox needed by the AC-SA baseline.
Vector euclidean_prox(const Regularizer& H, const Vector& v, double weight, double quad);

}  // namespace ccmd
