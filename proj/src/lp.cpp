#include "copsense/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copsense/error.hpp"

namespace copsense {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterLimit: return "IterLimit";
  }
  return "?";
}

namespace {

// Revised simplex over an explicit basis inverse. Sized for dense desk-scale
// problems; the inverse is refreshed periodically to keep round-off in check.
class Simplex {
public:
  Simplex(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Tolerances& tol)
      : a_(a), b_(b), m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())), tol_(tol) {}

  // basis: column indices, initially the artificial identity block appended by caller.
  SolveStatus run(const Eigen::VectorXd& cost, std::vector<int>& basis, long iter_cap,
                  int first_artificial, long& iters_done) {
    cost_ = cost;
    basis_ = &basis;
    first_art_ = first_artificial;
    refresh();
    degenerate_run_ = 0;
    bland_ = false;
    const long bland_trigger = 3L * (m_ + n_);
    for (long it = 0; it < iter_cap; ++it) {
      ++iters_done;
      Eigen::VectorXd y = binv_.transpose() * basic_cost();
      int q = price(y);
      if (q < 0) return SolveStatus::Optimal;
      Eigen::VectorXd u = binv_ * a_.col(q);
      int leave = ratio_test(u);
      if (leave < 0) return SolveStatus::Unbounded;
      // Track degeneracy and fall back to Bland's rule to guarantee termination.
      if (xb_(leave) <= tol_.lp_feas) {
        if (++degenerate_run_ > bland_trigger) bland_ = true;
      } else {
        degenerate_run_ = 0;
      }
      pivot(q, leave, u);
    }
    return SolveStatus::IterLimit;
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) x((*basis_)[i]) = std::max(0.0, xb_(i));
    return x;
  }

  Eigen::VectorXd duals() const { return binv_.transpose() * basic_cost(); }

private:
  Eigen::VectorXd basic_cost() const {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_((*basis_)[i]);
    return cb;
  }

  void refresh() {
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = a_.col((*basis_)[i]);
    binv_ = bmat.partialPivLu().inverse();
    xb_ = binv_ * b_;
    pivots_since_refresh_ = 0;
  }

  // Most negative reduced cost, or smallest eligible index under Bland's rule.
  int price(const Eigen::VectorXd& y) {
    int best = -1;
    double best_val = -tol_.lp_feas;
    for (int j = 0; j < n_; ++j) {
      if (in_basis(j)) continue;
      if (j >= first_art_ && banned_artificials_) continue;
      double d = cost_(j) - y.dot(a_.col(j));
      if (bland_) {
        if (d < -tol_.lp_feas) return j;
      } else if (d < best_val) {
        best_val = d;
        best = j;
      }
    }
    return best;
  }

  int ratio_test(const Eigen::VectorXd& u) {
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      int bi = (*basis_)[i];
      // Once phase 2 starts, a basic artificial sits at zero and must not move
      // off it: force it out as soon as the entering direction touches its row.
      bool artificial = banned_artificials_ && bi >= first_art_;
      if (artificial && std::abs(u(i)) > tol_.lp_feas) {
        double ratio = std::max(0.0, xb_(i)) / (u(i) > 0 ? u(i) : tol_.lp_feas);
        ratio = u(i) > 0 ? ratio : 0.0;
        if (ratio < best - tol_.lp_feas || (ratio < best + tol_.lp_feas && (leave < 0 || bi < (*basis_)[leave]))) {
          best = ratio;
          leave = i;
        }
        continue;
      }
      if (u(i) <= tol_.lp_feas) continue;
      double ratio = std::max(0.0, xb_(i)) / u(i);
      if (ratio < best - tol_.lp_feas) {
        best = ratio;
        leave = i;
      } else if (ratio < best + tol_.lp_feas && leave >= 0 && bi < (*basis_)[leave]) {
        leave = i;  // deterministic tie-break on basis index
      }
    }
    return leave;
  }

  void pivot(int enter, int leave, const Eigen::VectorXd& u) {
    double piv = u(leave);
    Eigen::VectorXd row = binv_.row(leave) / piv;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      binv_.row(i) -= u(i) * row.transpose();
    }
    binv_.row(leave) = row.transpose();
    (*basis_)[leave] = enter;
    xb_ = binv_ * b_;
    if (++pivots_since_refresh_ >= 64) refresh();
  }

  bool in_basis(int j) const {
    return std::find(basis_->begin(), basis_->end(), j) != basis_->end();
  }

public:
  void ban_artificials() { banned_artificials_ = true; }
  const Eigen::VectorXd& xb() const { return xb_; }
  Eigen::MatrixXd& binv() { return binv_; }
  void rebuild_from_basis() { refresh(); }

private:
  const Eigen::MatrixXd& a_;
  const Eigen::VectorXd& b_;
  int m_, n_;
  Tolerances tol_;
  Eigen::VectorXd cost_;
  std::vector<int>* basis_ = nullptr;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int first_art_ = 0;
  long degenerate_run_ = 0;
  bool bland_ = false;
  bool banned_artificials_ = false;
  int pivots_since_refresh_ = 0;
};

}  // namespace

SolveOutcome solve_lp(const LpProblem& p, const Tolerances& tol) {
  const int m = p.rows();
  const int n0 = p.cols();
  if (p.rhs.size() != m || p.cost.size() != n0)
    fail(ErrorCode::InvalidArgument, "solve_lp: inconsistent dimensions");
  for (int j : p.free_cols)
    if (j < 0 || j >= n0) fail(ErrorCode::InvalidArgument, "solve_lp: free column out of range");

  SolveOutcome out;
  if (m == 0) {
    // No rows: optimum is 0 unless some cost direction is unbounded below.
    for (int j = 0; j < n0; ++j) {
      bool is_free = std::find(p.free_cols.begin(), p.free_cols.end(), j) != p.free_cols.end();
      if (p.cost(j) < 0 || (is_free && p.cost(j) != 0)) {
        out.status = SolveStatus::Unbounded;
        return out;
      }
    }
    out.status = SolveStatus::Optimal;
    out.primal = Eigen::VectorXd::Zero(n0);
    out.duals = Eigen::VectorXd::Zero(0);
    out.objective = 0;
    return out;
  }

  // Split free variables into differences of nonnegative pairs.
  std::vector<int> split_of(n0, -1);
  int n = n0;
  for (int j : p.free_cols) {
    if (split_of[j] < 0) split_of[j] = n++;
  }
  const int nart = m;
  Eigen::MatrixXd a(m, n + nart);
  Eigen::VectorXd b = p.rhs;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n + nart);
  a.setZero();
  a.leftCols(n0) = p.eq;
  cost.head(n0) = p.cost;
  for (int j = 0; j < n0; ++j) {
    if (split_of[j] >= 0) {
      a.col(split_of[j]) = -p.eq.col(j);
      cost(split_of[j]) = -p.cost(j);
    }
  }
  std::vector<int> negated(m, 0);
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0) {
      b(i) = -b(i);
      a.row(i) = -a.row(i);
      negated[i] = 1;
    }
    a(i, n + i) = 1.0;
  }

  Simplex sx(a, b, tol);
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const long cap = 20000 + 400L * (m + n);
  long iters = 0;

  // Phase 1: drive artificials to zero.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + nart);
  phase1.tail(nart).setOnes();
  SolveStatus s1 = sx.run(phase1, basis, cap, n, iters);
  out.iterations = iters;
  if (s1 == SolveStatus::IterLimit) {
    out.status = SolveStatus::IterLimit;
    return out;
  }
  double art_sum = 0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) art_sum += std::max(0.0, sx.xb()(i));
  double feas_scale = 1.0 + b.cwiseAbs().maxCoeff();
  if (art_sum > 1e-7 * feas_scale) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  // Phase 2 on the true cost; artificials may stay basic at zero but are
  // barred from entering and get forced out by the ratio test if touched.
  sx.ban_artificials();
  SolveStatus s2 = sx.run(cost, basis, cap, n, iters);
  out.iterations = iters;
  if (s2 == SolveStatus::IterLimit || s2 == SolveStatus::Unbounded) {
    out.status = s2;
    return out;
  }

  Eigen::VectorXd xfull = sx.primal();
  Eigen::VectorXd x = xfull.head(n0);
  for (int j = 0; j < n0; ++j)
    if (split_of[j] >= 0) x(j) -= xfull(split_of[j]);
  Eigen::VectorXd y = sx.duals();
  for (int i = 0; i < m; ++i)
    if (negated[i]) y(i) = -y(i);

  out.status = SolveStatus::Optimal;
  out.primal = x;
  out.duals = y;
  out.objective = p.cost.dot(x);
  return out;
}

int LpBuilder::add_var(double cost, bool is_free) {
  costs_.push_back(cost);
  free_.push_back(is_free);
  return static_cast<int>(costs_.size()) - 1;
}

void LpBuilder::add_row(const std::vector<std::pair<int, double>>& terms, char rel, double rhs) {
  if (rel != '<' && rel != '=' && rel != '>') fail(ErrorCode::InvalidArgument, "LpBuilder: bad relation");
  rows_.push_back(Row{terms, rel, rhs});
}

LpProblem LpBuilder::build() const {
  int n = num_vars();
  int m = num_rows();
  int nslack = 0;
  for (const auto& r : rows_)
    if (r.rel != '=') ++nslack;
  LpProblem p;
  p.eq = Eigen::MatrixXd::Zero(m, n + nslack);
  p.rhs = Eigen::VectorXd::Zero(m);
  p.cost = Eigen::VectorXd::Zero(n + nslack);
  for (int j = 0; j < n; ++j) {
    p.cost(j) = costs_[j];
    if (free_[j]) p.free_cols.push_back(j);
  }
  int s = n;
  for (int i = 0; i < m; ++i) {
    const Row& r = rows_[i];
    for (auto [j, v] : r.terms) {
      if (j < 0 || j >= n) fail(ErrorCode::InvalidArgument, "LpBuilder: term column out of range");
      p.eq(i, j) += v;
    }
    p.rhs(i) = r.rhs;
    if (r.rel == '<') p.eq(i, s++) = 1.0;
    if (r.rel == '>') p.eq(i, s++) = -1.0;
  }
  return p;
}

}  // namespace copsense
