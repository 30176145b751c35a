#include "copsense/lift.hpp"

#include <algorithm>

#include "copsense/error.hpp"

namespace copsense {

int Lifting::binary_ordinal(int col) const {
  auto it = std::lower_bound(source.binaries.begin(), source.binaries.end(), col);
  if (it == source.binaries.end() || *it != col)
    fail(ErrorCode::InvalidArgument, "lifting: column is not binary");
  return static_cast<int>(it - source.binaries.begin());
}

Lifting build_lifting(const MbqpInstance& inst) {
  inst.validate();
  Lifting lift;
  const int n = inst.n, m = inst.m, d = n + 1;
  lift.dim = d;
  lift.source = inst;

  lift.cost = Eigen::MatrixXd::Zero(d, d);
  lift.cost.block(0, 1, 1, n) = inst.c.transpose();
  lift.cost.block(1, 0, n, 1) = inst.c;
  lift.cost.block(1, 1, n, n) = inst.Q;

  lift.homog = Eigen::MatrixXd::Zero(d, d);
  lift.homog(0, 0) = 1.0;

  lift.regularizer = lift.homog;
  lift.row_lin.reserve(m);
  lift.row_outer.reserve(m);
  lift.row_residual.reserve(m);
  lift.row_shift.reserve(m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd a = inst.A.row(i).transpose();
    Eigen::MatrixXd lin = Eigen::MatrixXd::Zero(d, d);
    lin.block(0, 1, 1, n) = a.transpose();
    lin.block(1, 0, n, 1) = a;
    Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
    outer.block(1, 1, n, n) = a * a.transpose();
    double bi = inst.b(i);
    lift.row_residual.push_back(bi * bi * lift.homog - bi * lin + outer);
    lift.row_shift.push_back(2.0 * bi * lift.homog - lin);
    lift.regularizer += outer;
    lift.row_lin.push_back(std::move(lin));
    lift.row_outer.push_back(std::move(outer));
  }

  for (int j : inst.binaries) {
    Eigen::MatrixXd nj = Eigen::MatrixXd::Zero(d, d);
    nj(0, j + 1) = -1.0;
    nj(j + 1, 0) = -1.0;
    nj(j + 1, j + 1) = 2.0;
    lift.binary_comp.push_back(std::move(nj));
  }
  return lift;
}

Eigen::MatrixXd rank_one_lift(const Eigen::VectorXd& x) {
  for (int i = 0; i < x.size(); ++i)
    if (x(i) < 0) fail(ErrorCode::InvalidArgument, "rank_one_lift: negative entry");
  Eigen::VectorXd y(x.size() + 1);
  y(0) = 1.0;
  y.tail(x.size()) = x;
  return y * y.transpose();
}

double quad_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& y) {
  if (m.rows() != m.cols() || m.rows() != y.size())
    fail(ErrorCode::InvalidArgument, "quad_form: dimension mismatch");
  return y.dot(m * y);
}

Eigen::MatrixXd building_block_g(const Lifting& lift, int binary_col, double f, double g, double r) {
  int ord = lift.binary_ordinal(binary_col);
  Eigen::MatrixXd out = r * lift.homog - g * lift.binary_comp[ord];
  for (const auto& kk : lift.row_residual) out += f * kk;
  return out;
}

std::vector<Eigen::MatrixXd> mccormick_rows(const Lifting& lift) {
  std::vector<Eigen::MatrixXd> rows;
  const auto& bins = lift.source.binaries;
  const int d = lift.dim;
  for (size_t a = 0; a < bins.size(); ++a) {
    for (size_t b = a + 1; b < bins.size(); ++b) {
      int i = bins[a] + 1, j = bins[b] + 1;  // lifted indices
      Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(d, d);
      s1(0, i) = s1(i, 0) = 0.5;
      s1(i, j) = s1(j, i) = -0.5;
      Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(d, d);
      s2(0, j) = s2(j, 0) = 0.5;
      s2(i, j) = s2(j, i) = -0.5;
      Eigen::MatrixXd s3 = Eigen::MatrixXd::Zero(d, d);
      s3(i, j) = s3(j, i) = 0.5;
      s3(0, i) = s3(i, 0) = -0.5;
      s3(0, j) = s3(j, 0) = -0.5;
      s3(0, 0) = 1.0;
      Eigen::MatrixXd s4 = Eigen::MatrixXd::Zero(d, d);
      s4(i, j) = s4(j, i) = 0.5;
      rows.push_back(std::move(s1));
      rows.push_back(std::move(s2));
      rows.push_back(std::move(s3));
      rows.push_back(std::move(s4));
    }
  }
  return rows;
}

}  // namespace copsense
