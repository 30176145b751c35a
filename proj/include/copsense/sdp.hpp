#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "copsense/config.hpp"
#include "copsense/lp.hpp"

namespace copsense {

enum class ConeTag { Psd, Nonneg, Free };

/// Linear objective over scalar variables and symmetric matrix blocks,
/// linear equality constraints across all of them, each matrix block tagged
/// with its cone and scalars carrying optional bounds.
struct SdpProblem {
  struct MatVar {
    int dim = 0;
    ConeTag cone = ConeTag::Free;
    Eigen::MatrixXd cost;  // empty means zero objective on this block
  };
  struct EqRow {
    std::vector<std::pair<int, double>> scalar_terms;
    std::vector<std::pair<int, Eigen::MatrixXd>> mat_terms;  // block id -> symmetric coefficient
    double rhs = 0.0;
  };

  Eigen::VectorXd scalar_cost;   // size = number of scalar variables
  Eigen::VectorXd scalar_lower;  // same size; -inf allowed
  Eigen::VectorXd scalar_upper;  // +inf allowed
  std::vector<MatVar> mats;
  std::vector<EqRow> rows;

  int num_scalars() const { return static_cast<int>(scalar_cost.size()); }
  int add_scalar(double cost, double lo, double hi);
  int add_mat(int dim, ConeTag cone);
};

struct SdpOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  Eigen::VectorXd scalars;
  std::vector<Eigen::MatrixXd> mats;
  /// Per equality row, value-function convention (see solve_lp).
  Eigen::VectorXd duals;
  double objective = 0.0;
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap_residual = 0.0;
  double infeasibility_residual = -1.0;  // set when status == Infeasible
};

struct SdpOptions {
  double tol = 1e-6;
  long max_iter = 100000;
  bool log_csv = false;        // iteration log (iter, primal res, dual res, objective)
  std::string log_path;
};

SdpOutcome solve_sdp(const SdpProblem& p, const SdpOptions& opt = SdpOptions{});

/// Multipliers for the requested equality rows of an Optimal outcome, in the
/// fixed-multiplier weak-duality convention: for row <M,Y> = rho,
///   objective(rho') >= objective(rho) + mu * (rho' - rho).
Eigen::VectorXd extract_equality_duals(const SdpOutcome& out, const std::vector<int>& row_ids);

}  // namespace copsense
