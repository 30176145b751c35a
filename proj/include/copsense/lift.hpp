#pragma once

#include <Eigen/Dense>
#include <vector>

#include "copsense/model.hpp"

namespace copsense {

/// The (n+1)-dimensional lifted matrices of a standard-form instance. Index 0
/// is the homogenization coordinate; original column j sits at index j+1.
struct Lifting {
  int dim = 0;
  Eigen::MatrixXd cost;        // [0 c'; c Q]
  Eigen::MatrixXd homog;       // single 1 at (0,0)
  Eigen::MatrixXd regularizer; // homog + sum of row_outer
  std::vector<Eigen::MatrixXd> row_lin;       // [0 a'; a 0] per row
  std::vector<Eigen::MatrixXd> row_outer;     // diag-block a a' per row
  std::vector<Eigen::MatrixXd> row_residual;  // b^2 homog - b row_lin + row_outer (PSD)
  std::vector<Eigen::MatrixXd> row_shift;     // 2 b homog - row_lin
  std::vector<Eigen::MatrixXd> binary_comp;   // complementarity block per binary, aligned with binaries
  MbqpInstance source;

  /// Ordinal of a binary column inside `source.binaries`.
  int binary_ordinal(int col) const;
};

Lifting build_lifting(const MbqpInstance& inst);

/// Y = (1;x)(1;x)'. Rejects negative entries.
Eigen::MatrixXd rank_one_lift(const Eigen::VectorXd& x);

double quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& y);

/// f * (sum of row_residual) - g * binary_comp_j + r * homog for binary column j.
Eigen::MatrixXd building_block_g(const Lifting& lift, int binary_col, double f, double g, double r);

/// McCormick inequalities over binary-binary pairs, emitted as symmetric
/// coefficient matrices with the sign convention <S, Y> >= 0. Per pair (i<j):
/// Y_{0i}-Y_{ij}, Y_{0j}-Y_{ij}, Y_{ij}-Y_{0i}-Y_{0j}+Y_{00}, Y_{ij}.
std::vector<Eigen::MatrixXd> mccormick_rows(const Lifting& lift);

}  // namespace copsense
