#pragma once

#include <Eigen/Dense>

#include "copsense/config.hpp"

namespace copsense {

struct EigenPair {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, M = V * diag(values) * V^T
};

/// Symmetric eigendecomposition. Rejects visibly non-symmetric input.
EigenPair sym_eigen(const Eigen::MatrixXd& m, const Tolerances& tol = default_tol());

/// Frobenius-nearest PSD matrix (eigenvalue clipping at zero).
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m, const Tolerances& tol = default_tol());

double min_eigenvalue(const Eigen::MatrixXd& m);
double max_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace copsense
