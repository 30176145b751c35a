#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "copsense/config.hpp"

namespace copsense {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterLimit };

const char* to_string(SolveStatus s);

/// min cost'z  s.t.  eq z = rhs, z >= 0 (columns flagged in free_cols are unrestricted).
struct LpProblem {
  Eigen::MatrixXd eq;
  Eigen::VectorXd rhs;
  Eigen::VectorXd cost;
  std::vector<int> free_cols;

  int rows() const { return static_cast<int>(eq.rows()); }
  int cols() const { return static_cast<int>(eq.cols()); }
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::IterLimit;
  Eigen::VectorXd primal;
  /// One multiplier per equality row, in the value-function convention:
  /// value(rhs') >= value(rhs) + duals.dot(rhs' - rhs) for nearby rhs'.
  Eigen::VectorXd duals;
  double objective = 0.0;
  long iterations = 0;
};

SolveOutcome solve_lp(const LpProblem& p, const Tolerances& tol = default_tol());

/// Small helper for assembling LPs stated with <= / >= rows; appends slack
/// columns and returns the standard form together with the original
/// column/row count so the caller can slice solutions and duals.
class LpBuilder {
public:
  /// Returns the index of the new variable (nonnegative unless is_free).
  int add_var(double cost, bool is_free = false);
  /// rel is one of '<', '=', '>'.
  void add_row(const std::vector<std::pair<int, double>>& terms, char rel, double rhs);

  LpProblem build() const;
  int num_vars() const { return static_cast<int>(costs_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    char rel;
    double rhs;
  };
  std::vector<double> costs_;
  std::vector<bool> free_;
  std::vector<Row> rows_;
};

}  // namespace copsense
