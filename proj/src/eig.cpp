#include "copsense/eig.hpp"

#include <Eigen/Eigenvalues>

#include "copsense/error.hpp"

namespace copsense {

static void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::InvalidArgument, "sym_eigen: matrix not square");
  double scale = 1.0 + m.norm();
  double asym = (m - m.transpose()).norm();
  if (asym > 1e-9 * scale) fail(ErrorCode::InvalidArgument, "sym_eigen: matrix not symmetric");
}

EigenPair sym_eigen(const Eigen::MatrixXd& m, const Tolerances&) {
  require_symmetric(m);
  // Symmetrize exactly so round-off in the input cannot leak into the solver.
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) fail(ErrorCode::Numerical, "sym_eigen: eigensolver failed");
  return EigenPair{es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m, const Tolerances& tol) {
  EigenPair ep = sym_eigen(m, tol);
  Eigen::VectorXd clipped = ep.values.cwiseMax(0.0);
  return ep.vectors * clipped.asDiagonal() * ep.vectors.transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) { return sym_eigen(m).values.minCoeff(); }

double max_eigenvalue(const Eigen::MatrixXd& m) { return sym_eigen(m).values.maxCoeff(); }

}  // namespace copsense
