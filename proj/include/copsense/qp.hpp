#pragma once

#include <Eigen/Dense>

#include "copsense/config.hpp"
#include "copsense/lp.hpp"

namespace copsense {

/// min z' quad z + 2 lin' z  s.t.  eq z = rhs, lower <= z <= upper.
/// quad must be symmetric PSD; bounds may be +-infinity.
struct QpProblem {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  Eigen::MatrixXd eq;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int rows() const { return static_cast<int>(eq.rows()); }
  int cols() const { return static_cast<int>(lin.size()); }
};

struct QpOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  Eigen::VectorXd primal;
  /// Per equality row; value-function convention as in solve_lp.
  Eigen::VectorXd eq_duals;
  /// Per variable; nonzero only on active bounds, same convention applied to
  /// the bound value (raising an active upper bound changes the optimum by
  /// bound_duals[i] * delta to first order).
  Eigen::VectorXd bound_duals;
  double objective = 0.0;
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool polished = false;
};

QpOutcome solve_qp(const QpProblem& p, const Tolerances& tol = default_tol());

}  // namespace copsense
