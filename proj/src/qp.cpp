#include "copsense/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copsense/eig.hpp"
#include "copsense/error.hpp"

namespace copsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  // Stacked constraint view: rows of eq first, then one box row per variable.
  Eigen::MatrixXd a;
  Eigen::VectorXd lo, hi;
  int m_eq, n;
};

Eigen::VectorXd clamp(const Eigen::VectorXd& v, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Solve the equality-constrained QP restricted to the guessed active set and
// accept the result only if it satisfies every KKT condition. Gives exact
// multipliers when the guess is right.
bool polish(const QpProblem& p, const Workspace& w, const Eigen::VectorXd& x_admm,
            const Eigen::VectorXd& y_admm, const Tolerances& tol, QpOutcome& out) {
  const int n = w.n, m = w.m_eq;
  std::vector<int> at_lower, at_upper;
  double guess_tol = std::sqrt(tol.qp_residual);
  for (int i = 0; i < n; ++i) {
    bool lo_fin = std::isfinite(p.lower(i)), hi_fin = std::isfinite(p.upper(i));
    if (lo_fin && x_admm(i) - p.lower(i) < guess_tol * (1 + std::abs(p.lower(i))))
      at_lower.push_back(i);
    else if (hi_fin && p.upper(i) - x_admm(i) < guess_tol * (1 + std::abs(p.upper(i))))
      at_upper.push_back(i);
  }
  int k = static_cast<int>(at_lower.size() + at_upper.size());
  int dim = n + m + k;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  kkt.topLeftCorner(n, n) = 2.0 * p.quad;
  // Light Tikhonov term keeps the system solvable when the active set is
  // degenerate; refined away below.
  kkt.topLeftCorner(n, n).diagonal().array() += 1e-11;
  if (m > 0) {
    kkt.block(0, n, n, m) = p.eq.transpose();
    kkt.block(n, 0, m, n) = p.eq;
    rhs.segment(n, m) = p.rhs;
  }
  int r = n + m;
  for (int i : at_lower) {
    kkt(r, i) = 1;
    kkt(i, r) = 1;
    rhs(r) = p.lower(i);
    ++r;
  }
  for (int i : at_upper) {
    kkt(r, i) = 1;
    kkt(i, r) = 1;
    rhs(r) = p.upper(i);
    ++r;
  }
  rhs.head(n) = -2.0 * p.lin;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(kkt);
  Eigen::VectorXd sol = lu.solve(rhs);
  // one step of iterative refinement
  sol += lu.solve(rhs - kkt * sol);
  if (!sol.allFinite()) return false;

  Eigen::VectorXd x = sol.head(n);
  Eigen::VectorXd y_eq = m > 0 ? Eigen::VectorXd(sol.segment(n, m)) : Eigen::VectorXd(0);
  Eigen::VectorXd y_bnd = Eigen::VectorXd::Zero(n);
  r = n + m;
  for (int i : at_lower) y_bnd(i) = sol(r++);
  for (int i : at_upper) y_bnd(i) = sol(r++);

  double feas_scale = 1 + x.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    if (x(i) < p.lower(i) - tol.qp_residual * feas_scale) return false;
    if (x(i) > p.upper(i) + tol.qp_residual * feas_scale) return false;
  }
  // Multiplier signs: stationarity is 2Qx + 2q + E'y_eq + y_bnd = 0, so an
  // active lower bound carries y_bnd <= 0 and an active upper bound >= 0.
  for (int i : at_lower)
    if (y_bnd(i) > tol.qp_residual * 10) return false;
  for (int i : at_upper)
    if (y_bnd(i) < -tol.qp_residual * 10) return false;

  Eigen::VectorXd stat = 2 * p.quad * x + 2 * p.lin;
  if (m > 0) stat += p.eq.transpose() * y_eq;
  Eigen::VectorXd stat_full = stat + y_bnd;
  (void)y_admm;
  double dres = stat_full.cwiseAbs().maxCoeff();
  double pres = m > 0 ? (p.eq * x - p.rhs).cwiseAbs().maxCoeff() : 0.0;
  double rhs_scale = m > 0 ? 1 + p.rhs.cwiseAbs().maxCoeff() : 1.0;
  if (dres > tol.qp_residual * (1 + stat.cwiseAbs().maxCoeff())) return false;
  if (pres > tol.qp_residual * rhs_scale) return false;

  out.primal = x;
  out.eq_duals = m > 0 ? Eigen::VectorXd(-y_eq) : Eigen::VectorXd(0);
  out.bound_duals = -y_bnd;
  out.objective = x.dot(p.quad * x) + 2 * p.lin.dot(x);
  out.primal_residual = pres;
  out.dual_residual = dres;
  out.polished = true;
  return true;
}

}  // namespace

QpOutcome solve_qp(const QpProblem& p, const Tolerances& tol) {
  const int n = p.cols();
  const int m = p.rows();
  if (p.quad.rows() != n || p.quad.cols() != n || (m > 0 && p.eq.cols() != n) ||
      p.rhs.size() != m || p.lower.size() != n || p.upper.size() != n)
    fail(ErrorCode::InvalidArgument, "solve_qp: inconsistent dimensions");
  if ((p.quad - p.quad.transpose()).norm() > 1e-8 * (1 + p.quad.norm()))
    fail(ErrorCode::InvalidArgument, "solve_qp: quad not symmetric");
  if (n > 0 && min_eigenvalue(p.quad) < -tol.psd_eig * (1 + p.quad.norm()))
    fail(ErrorCode::DomainError, "solve_qp: quad not PSD");

  QpOutcome out;
  if (n == 0) {
    out.status = SolveStatus::Optimal;
    out.primal = Eigen::VectorXd(0);
    out.eq_duals = Eigen::VectorXd::Zero(m);
    out.bound_duals = Eigen::VectorXd(0);
    return out;
  }

  Workspace w;
  w.m_eq = m;
  w.n = n;
  const int rows = m + n;
  w.a.setZero(rows, n);
  if (m > 0) w.a.topRows(m) = p.eq;
  w.a.bottomRows(n).setIdentity();
  w.lo.resize(rows);
  w.hi.resize(rows);
  if (m > 0) {
    w.lo.head(m) = p.rhs;
    w.hi.head(m) = p.rhs;
  }
  w.lo.tail(n) = p.lower;
  w.hi.tail(n) = p.upper;

  const double sigma = 1e-6;
  double rho = 0.1;
  const double rho_eq_scale = 1e3;
  const double alpha = 1.6;

  Eigen::VectorXd rho_vec(rows);
  auto set_rho = [&](double r_) {
    for (int i = 0; i < rows; ++i) {
      bool is_eq = i < m || (std::isfinite(w.lo(i)) && std::isfinite(w.hi(i)) && w.lo(i) == w.hi(i));
      rho_vec(i) = is_eq ? r_ * rho_eq_scale : r_;
    }
  };

  Eigen::MatrixXd kkt(n + rows, n + rows);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  auto factor = [&]() {
    kkt.setZero();
    kkt.topLeftCorner(n, n) = 2.0 * p.quad;
    kkt.topLeftCorner(n, n).diagonal().array() += sigma;
    kkt.topRightCorner(n, rows) = w.a.transpose();
    kkt.bottomLeftCorner(rows, n) = w.a;
    kkt.bottomRightCorner(rows, rows).diagonal() = -rho_vec.cwiseInverse();
    lu.compute(kkt);
  };
  set_rho(rho);
  factor();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = clamp(Eigen::VectorXd::Zero(rows), w.lo, w.hi);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  Eigen::VectorXd rhs(n + rows), xt, zt, z_prev, y_prev, dy, dx, x_prev;

  const long max_iter = 200000;
  long it = 0;
  double pres = kInf, dres = kInf;
  const int check_every = 25;

  for (it = 1; it <= max_iter; ++it) {
    rhs.head(n) = sigma * x - 2.0 * p.lin;
    rhs.tail(rows) = z - y.cwiseQuotient(rho_vec);
    Eigen::VectorXd sol = lu.solve(rhs);
    xt = sol.head(n);
    Eigen::VectorXd nu = sol.tail(rows);
    zt = z + (nu - y).cwiseQuotient(rho_vec);
    x_prev = x;
    z_prev = z;
    y_prev = y;
    x = alpha * xt + (1 - alpha) * x;
    Eigen::VectorXd z_in = alpha * zt + (1 - alpha) * z + y.cwiseQuotient(rho_vec);
    z = clamp(z_in, w.lo, w.hi);
    y = y + rho_vec.cwiseProduct(alpha * zt + (1 - alpha) * z_prev - z);

    if (it % check_every != 0) continue;

    Eigen::VectorXd ax = w.a * x;
    pres = (ax - z).cwiseAbs().maxCoeff();
    Eigen::VectorXd stat = 2 * p.quad * x + 2 * p.lin + w.a.transpose() * y;
    dres = stat.cwiseAbs().maxCoeff();
    double pscale = 1 + std::max(ax.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff());
    double dscale = 1 + std::max((2 * p.quad * x).cwiseAbs().maxCoeff(),
                                 std::max((2 * p.lin).cwiseAbs().maxCoeff(), (w.a.transpose() * y).cwiseAbs().maxCoeff()));
    if (pres <= tol.qp_residual * pscale && dres <= tol.qp_residual * dscale) {
      out.status = SolveStatus::Optimal;
      break;
    }

    // Divergence certificates (checked on the iterate deltas, OSQP style).
    dy = y - y_prev;
    dx = x - x_prev;
    double dy_norm = dy.cwiseAbs().maxCoeff();
    if (dy_norm > 1e-12) {
      Eigen::VectorXd aty = w.a.transpose() * dy;
      double support = 0;
      for (int i = 0; i < rows; ++i) {
        if (dy(i) > 0) support += std::isfinite(w.hi(i)) ? w.hi(i) * dy(i) : kInf;
        if (dy(i) < 0) support += std::isfinite(w.lo(i)) ? w.lo(i) * dy(i) : -kInf;
      }
      if (aty.cwiseAbs().maxCoeff() <= 1e-4 * dy_norm && support < -1e-4 * dy_norm) {
        out.status = SolveStatus::Infeasible;
        out.iterations = it;
        return out;
      }
    }
    double dx_norm = dx.cwiseAbs().maxCoeff();
    if (dx_norm > 1e-12) {
      double qdx = (2 * p.quad * dx).cwiseAbs().maxCoeff();
      double cdx = 2 * p.lin.dot(dx);
      Eigen::VectorXd adx = w.a * dx;
      bool recession = true;
      for (int i = 0; i < rows && recession; ++i) {
        if (adx(i) > 1e-4 * dx_norm && std::isfinite(w.hi(i))) recession = false;
        if (adx(i) < -1e-4 * dx_norm && std::isfinite(w.lo(i))) recession = false;
      }
      if (qdx <= 1e-4 * dx_norm && cdx < -1e-4 * dx_norm && recession) {
        out.status = SolveStatus::Unbounded;
        out.iterations = it;
        return out;
      }
    }

    // Residual-balancing penalty update.
    double pr = pres / std::max(1e-12, pscale);
    double dr = dres / std::max(1e-12, dscale);
    double ratio = std::sqrt(pr / std::max(1e-16, dr));
    if (ratio > 5 || ratio < 0.2) {
      rho = std::min(1e6, std::max(1e-6, rho * ratio));
      set_rho(rho);
      factor();
    }
  }
  out.iterations = std::min(it, max_iter);
  if (out.status != SolveStatus::Optimal) {
    out.status = SolveStatus::IterLimit;
  }

  // Map ADMM multipliers to the outward convention, then try to polish.
  out.primal = x;
  out.eq_duals = m > 0 ? Eigen::VectorXd(-y.head(m)) : Eigen::VectorXd(0);
  out.bound_duals = -y.tail(n);
  out.objective = x.dot(p.quad * x) + 2 * p.lin.dot(x);
  out.primal_residual = pres;
  out.dual_residual = dres;
  QpOutcome polished = out;
  if (polish(p, w, x, y, tol, polished)) {
    polished.status = SolveStatus::Optimal;
    polished.iterations = out.iterations;
    return polished;
  }
  return out;
}

}  // namespace copsense
