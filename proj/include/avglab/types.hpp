#pragma once

#include <Eigen/Dense>

namespace avglab {

/// Finite-dimensional real state. All solvers and estimators work in double
/// precision; determinism contracts (bitwise-identical reruns, memo keys on
/// raw bit patterns) rely on that.
using StateVec = Eigen::VectorXd;

[[nodiscard]] inline bool all_finite(const StateVec& v) { return v.allFinite(); }

}  // namespace avglab
