#pragma once

#include <Eigen/Dense>

namespace ccmd {

using Vector = Eigen::VectorXd;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace ccmd
