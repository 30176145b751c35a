#include "copsense/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "copsense/eig.hpp"
#include "copsense/error.hpp"

namespace copsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Objective data used for subproblems: possibly a diagonally shifted Q that
// agrees with the original on binary points (x^2 = x) but is PSD, so the
// partially fixed relaxation stays convex and is still a valid lower bound.
struct ConvexObjective {
  Eigen::MatrixXd quad;   // shifted quadratic
  Eigen::VectorXd lin;    // shifted linear part (2 lin' x convention)
  bool is_lp = false;     // quad identically zero
};

ConvexObjective make_bound_objective(const MbqpInstance& inst, const Tolerances& tol) {
  ConvexObjective obj;
  obj.quad = inst.Q;
  obj.lin = inst.c;
  double qscale = inst.n > 0 ? inst.Q.cwiseAbs().maxCoeff() : 0.0;
  if (qscale == 0.0) {
    obj.is_lp = true;
    return obj;
  }
  double lambda = min_eigenvalue(inst.Q);
  if (lambda >= -tol.psd_eig * (1 + qscale)) return obj;

  // Not PSD: allowed only when the quadratic lives on the binary block.
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (inst.Q(i, j) != 0.0 && (!inst.is_binary(i) || !inst.is_binary(j)))
        fail(ErrorCode::DomainError, "solve_exact: nonconvex Q with continuous variables");
  double shift = -lambda + 1e-9 * (1 + qscale);
  for (int j : inst.binaries) {
    obj.quad(j, j) += shift;
    obj.lin(j) -= 0.5 * shift;  // keeps values equal whenever x_j^2 = x_j
  }
  return obj;
}

struct Reduced {
  std::vector<int> keep;    // kept column indices
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  double constant = 0.0;
  bool is_lp = false;
};

Reduced reduce(const MbqpInstance& inst, const ConvexObjective& obj,
               const std::vector<int>& fixed_cols, const std::vector<double>& fixed_vals) {
  Reduced r;
  std::vector<bool> is_fixed(inst.n, false);
  for (int c : fixed_cols) is_fixed[c] = true;
  for (int j = 0; j < inst.n; ++j)
    if (!is_fixed[j]) r.keep.push_back(j);
  const int k = static_cast<int>(r.keep.size());

  Eigen::VectorXd xfix = Eigen::VectorXd::Zero(inst.n);
  for (size_t t = 0; t < fixed_cols.size(); ++t) xfix(fixed_cols[t]) = fixed_vals[t];

  r.b = inst.b - inst.A * xfix;
  r.a.resize(inst.m, k);
  for (int t = 0; t < k; ++t) r.a.col(t) = inst.A.col(r.keep[t]);

  Eigen::VectorXd qx = obj.quad * xfix;
  r.quad.resize(k, k);
  r.lin.resize(k);
  for (int t = 0; t < k; ++t) {
    r.lin(t) = obj.lin(r.keep[t]) + qx(r.keep[t]);
    for (int s = 0; s < k; ++s) r.quad(t, s) = obj.quad(r.keep[t], r.keep[s]);
  }
  r.constant = xfix.dot(obj.quad * xfix) + 2.0 * obj.lin.dot(xfix);
  r.is_lp = k == 0 || r.quad.cwiseAbs().maxCoeff() == 0.0;
  return r;
}

struct SubSolve {
  SolveStatus status;
  double value = kInf;  // includes the constant
  Eigen::VectorXd x;    // kept columns
};

SubSolve solve_reduced(const Reduced& r, const Tolerances& tol) {
  SubSolve out;
  const int k = static_cast<int>(r.keep.size());
  if (r.is_lp) {
    LpProblem lp;
    lp.eq = r.a;
    lp.rhs = r.b;
    lp.cost = 2.0 * r.lin;
    SolveOutcome o = solve_lp(lp, tol);
    out.status = o.status;
    if (o.status == SolveStatus::Optimal) {
      out.value = o.objective + r.constant;
      out.x = o.primal;
    }
    return out;
  }
  QpProblem qp;
  qp.quad = r.quad;
  qp.lin = r.lin;
  qp.eq = r.a;
  qp.rhs = r.b;
  qp.lower = Eigen::VectorXd::Zero(k);
  qp.upper = Eigen::VectorXd::Constant(k, kInf);
  QpOutcome o = solve_qp(qp, tol);
  out.status = o.status;
  if (o.status == SolveStatus::Optimal) {
    out.value = o.objective + r.constant;
    out.x = o.primal;
  }
  return out;
}

struct BnbState {
  const MbqpInstance* inst;
  const ConvexObjective* obj;
  Tolerances tol;
  long budget;
  bool prune;
  long nodes = 0;
  bool out_of_budget = false;
  bool unbounded = false;
  double best = kInf;
  Eigen::VectorXd best_x;
  std::vector<int> fixed_cols;
  std::vector<double> fixed_vals;
};

void bnb(BnbState& st, size_t depth) {
  if (st.unbounded || st.out_of_budget) return;
  if (st.nodes++ >= st.budget) {
    st.out_of_budget = true;
    return;
  }
  const auto& bins = st.inst->binaries;
  Reduced r = reduce(*st.inst, *st.obj, st.fixed_cols, st.fixed_vals);
  SubSolve sub = solve_reduced(r, st.tol);
  if (sub.status == SolveStatus::Infeasible) return;
  bool leaf = depth == bins.size();
  if (sub.status == SolveStatus::Unbounded) {
    if (leaf) st.unbounded = true;
    // an unbounded relaxation gives no usable bound; fall through and branch
    if (leaf) return;
  } else if (sub.status != SolveStatus::Optimal) {
    // solver gave up; treat as no bound available
    if (leaf) return;
  } else {
    if (leaf || (st.prune && sub.value >= st.best - 1e-9 * (1 + std::abs(st.best)))) {
      if (leaf && sub.value < st.best) {
        st.best = sub.value;
        Eigen::VectorXd full = Eigen::VectorXd::Zero(st.inst->n);
        for (size_t t = 0; t < st.fixed_cols.size(); ++t) full(st.fixed_cols[t]) = st.fixed_vals[t];
        for (size_t t = 0; t < r.keep.size(); ++t) full(r.keep[t]) = std::max(0.0, sub.x(t));
        st.best_x = full;
      }
      if (leaf || st.prune) return;
    }
  }
  if (leaf) return;
  int j = bins[depth];
  for (double v : {0.0, 1.0}) {
    st.fixed_cols.push_back(j);
    st.fixed_vals.push_back(v);
    bnb(st, depth + 1);
    st.fixed_cols.pop_back();
    st.fixed_vals.pop_back();
    if (st.unbounded || st.out_of_budget) return;
  }
}

}  // namespace

const char* to_string(ExactStatus s) {
  switch (s) {
    case ExactStatus::Optimal: return "Optimal";
    case ExactStatus::Infeasible: return "Infeasible";
    case ExactStatus::Unbounded: return "Unbounded";
    case ExactStatus::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

ExactResult solve_exact(const MbqpInstance& inst, const ExactOptions& opt) {
  inst.validate();
  Tolerances tol;
  ConvexObjective obj = make_bound_objective(inst, tol);
  BnbState st;
  st.inst = &inst;
  st.obj = &obj;
  st.tol = tol;
  st.budget = opt.node_budget;
  st.prune = opt.prune;
  bnb(st, 0);

  ExactResult res;
  res.nodes = st.nodes;
  if (st.unbounded) {
    res.status = ExactStatus::Unbounded;
    res.z = -kInf;
    return res;
  }
  if (st.out_of_budget) {
    res.status = ExactStatus::BudgetExceeded;
    res.z = st.best;
    res.argmin = st.best_x;
    return res;
  }
  if (st.best == kInf) {
    res.status = ExactStatus::Infeasible;
    return res;
  }
  res.status = ExactStatus::Optimal;
  res.argmin = st.best_x;
  res.z = inst.objective(st.best_x);
  return res;
}

ContResult solve_cont(const MbqpInstance& inst) {
  inst.validate();
  Tolerances tol;
  ContResult res;
  double qscale = inst.n > 0 ? inst.Q.cwiseAbs().maxCoeff() : 0.0;
  if (qscale == 0.0) {
    LpProblem lp;
    lp.eq = inst.A;
    lp.rhs = inst.b;
    lp.cost = 2.0 * inst.c;
    SolveOutcome o = solve_lp(lp, tol);
    res.status = o.status;
    if (o.status == SolveStatus::Optimal) {
      res.value = o.objective;
      res.x = o.primal;
      res.duals = o.duals;
    }
    return res;
  }
  if (min_eigenvalue(inst.Q) < -tol.psd_eig * (1 + qscale))
    fail(ErrorCode::DomainError, "solve_cont: Q not PSD");
  QpProblem qp;
  qp.quad = inst.Q;
  qp.lin = inst.c;
  qp.eq = inst.A;
  qp.rhs = inst.b;
  qp.lower = Eigen::VectorXd::Zero(inst.n);
  qp.upper = Eigen::VectorXd::Constant(inst.n, kInf);
  QpOutcome o = solve_qp(qp, tol);
  res.status = o.status;
  if (o.status == SolveStatus::Optimal) {
    res.value = o.objective;
    res.x = o.primal;
    res.duals = o.eq_duals;
  }
  return res;
}

namespace {

// One zeta subproblem: rows relaxed to [b-eps, b+eps] via bounded slack
// variables, binaries boxed per the (partial) pattern, unfixed ones relaxed.
struct ZetaSub {
  const MbqpInstance* inst;
  double eps;
  bool lp;  // true when Q is identically zero

  SubSolve solve(const std::vector<int>& fix, const Tolerances& tol) const {
    const auto& bins = inst->binaries;
    const int n = inst->n, m = inst->m;
    SubSolve out;
    if (lp) {
      LpBuilder bld;
      for (int j = 0; j < n; ++j) bld.add_var(2.0 * inst->c(j));
      for (int i = 0; i < m; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < n; ++j)
          if (inst->A(i, j) != 0.0) terms.emplace_back(j, inst->A(i, j));
        bld.add_row(terms, '<', inst->b(i) + eps);
        bld.add_row(terms, '>', inst->b(i) - eps);
      }
      for (size_t t = 0; t < bins.size(); ++t) {
        int j = bins[t];
        double lo, hi;
        if (t < fix.size()) {
          lo = std::max(0.0, fix[t] - eps);
          hi = fix[t] + eps;
        } else {
          lo = 0.0;
          hi = 1.0 + eps;
        }
        bld.add_row({{j, 1.0}}, '<', hi);
        if (lo > 0) bld.add_row({{j, 1.0}}, '>', lo);
      }
      SolveOutcome o = solve_lp(bld.build(), tol);
      out.status = o.status;
      if (o.status == SolveStatus::Optimal) {
        out.value = o.objective;
        out.x = o.primal.head(n);
      }
      return out;
    }
    QpProblem qp;
    const int nv = n + m;  // x plus one bounded slack per row
    qp.quad = Eigen::MatrixXd::Zero(nv, nv);
    qp.quad.topLeftCorner(n, n) = inst->Q;
    qp.lin = Eigen::VectorXd::Zero(nv);
    qp.lin.head(n) = inst->c;
    qp.eq = Eigen::MatrixXd::Zero(m, nv);
    qp.eq.leftCols(n) = inst->A;
    qp.eq.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
    qp.rhs = Eigen::VectorXd::Zero(m);
    qp.lower = Eigen::VectorXd::Constant(nv, 0.0);
    qp.upper = Eigen::VectorXd::Constant(nv, kInf);
    qp.lower.tail(m) = inst->b.array() - eps;
    qp.upper.tail(m) = inst->b.array() + eps;
    for (size_t t = 0; t < bins.size(); ++t) {
      int j = bins[t];
      if (t < fix.size()) {
        qp.lower(j) = std::max(0.0, fix[t] - eps);
        qp.upper(j) = fix[t] + eps;
      } else {
        qp.upper(j) = 1.0 + eps;
      }
    }
    QpOutcome o = solve_qp(qp, tol);
    out.status = o.status;
    if (o.status == SolveStatus::Optimal) {
      out.value = o.objective;
      out.x = o.primal.head(n);
    }
    return out;
  }
};

// Projected-gradient descent probe for nonconvex objectives over a capped box;
// returns a feasible upper estimate (or +inf when projection fails).
double divergence_probe(const MbqpInstance& inst, double eps, double cap, int tries,
                        std::mt19937_64& rng, const Tolerances& tol) {
  const int n = inst.n, m = inst.m;
  auto project = [&](const Eigen::VectorXd& pt) -> Eigen::VectorXd {
    QpProblem qp;
    const int nv = n + m;
    qp.quad = Eigen::MatrixXd::Identity(nv, nv);
    qp.quad.bottomRightCorner(m, m).setZero();
    qp.quad.bottomRightCorner(m, m).diagonal().setConstant(1e-6);
    qp.lin = Eigen::VectorXd::Zero(nv);
    qp.lin.head(n) = -pt;
    qp.eq = Eigen::MatrixXd::Zero(m, nv);
    qp.eq.leftCols(n) = inst.A;
    qp.eq.rightCols(m) = -Eigen::MatrixXd::Identity(m, m);
    qp.rhs = Eigen::VectorXd::Zero(m);
    qp.lower = Eigen::VectorXd::Zero(nv);
    qp.upper = Eigen::VectorXd::Constant(nv, cap);
    qp.lower.tail(m) = inst.b.array() - eps;
    qp.upper.tail(m) = inst.b.array() + eps;
    QpOutcome o = solve_qp(qp, tol);
    if (o.status != SolveStatus::Optimal) return Eigen::VectorXd();
    return o.primal.head(n);
  };

  double grad_scale = 1.0 + 2.0 * inst.Q.cwiseAbs().maxCoeff() * cap + 2.0 * inst.c.cwiseAbs().maxCoeff();
  double best = kInf;
  for (int t = 0; t < tries; ++t) {
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j)
      x0(j) = std::uniform_real_distribution<double>(0.0, cap)(rng);
    Eigen::VectorXd x = project(x0);
    if (x.size() == 0) continue;
    double step = cap / grad_scale;
    double val = inst.objective(x);
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd g = 2.0 * (inst.Q * x) + 2.0 * inst.c;
      Eigen::VectorXd xn = project(x - step * g);
      if (xn.size() == 0) break;
      double vn = inst.objective(xn);
      if (vn < val - 1e-12 * (1 + std::abs(val))) {
        x = xn;
        val = vn;
        step *= 1.25;
      } else {
        step *= 0.5;
        if (step * grad_scale < 1e-9 * cap) break;
      }
    }
    best = std::min(best, val);
  }
  return best;
}

}  // namespace

ZetaResult zeta_probe(const MbqpInstance& inst, double eps, const ZetaOptions& opt) {
  inst.validate();
  if (eps < 0) fail(ErrorCode::InvalidArgument, "zeta_probe: eps must be nonnegative");
  Tolerances tol;
  ZetaResult res;

  double qscale = inst.n > 0 ? inst.Q.cwiseAbs().maxCoeff() : 0.0;
  bool psd = qscale == 0.0 || min_eigenvalue(inst.Q) >= -tol.psd_eig * (1 + qscale);

  if (!psd) {
    // Boundedness check: maximize e'x over the relaxation.
    LpProblem bound_lp;
    bound_lp.eq = inst.A;
    bound_lp.rhs = inst.b;
    bound_lp.cost = -Eigen::VectorXd::Ones(inst.n);
    SolveOutcome bo = solve_lp(bound_lp, tol);
    bool bounded = bo.status == SolveStatus::Optimal;
    if (!bounded) {
      // Nonconvex and unbounded: growing-box sampled probe, never exact.
      std::mt19937_64 rng(opt.rng_seed);
      res.exact = false;
      res.value = kInf;
      for (double cap : opt.box_caps) {
        double v = divergence_probe(inst, eps, cap, 8, rng, tol);
        res.cap_values.push_back(v);
        res.value = std::min(res.value, v);
      }
      res.feasible = std::isfinite(res.value);
      return res;
    }
    if (!inst.binaries.empty())
      fail(ErrorCode::DomainError, "zeta_probe: nonconvex quadratic with binaries unsupported");
    // Bounded nonconvex with no binaries: sample within the bounded box.
    std::mt19937_64 rng(opt.rng_seed);
    double cap = 1.0 + bo.primal.maxCoeff();
    res.exact = false;
    res.value = divergence_probe(inst, eps, cap, 16, rng, tol);
    res.feasible = std::isfinite(res.value);
    return res;
  }

  ZetaSub sub{&inst, eps, qscale == 0.0};
  const size_t nb = inst.binaries.size();
  double best = kInf;
  bool complete = true;

  if (nb <= 62 && (1LL << std::min<size_t>(nb, 62)) <= opt.pattern_cap) {
    // DFS over patterns with relaxation pruning; equivalent to complete
    // enumeration of all nonempty pattern sets.
    std::vector<int> fix;
    long nodes = 0;
    const long node_cap = 64L * opt.pattern_cap;
    std::function<void(size_t)> rec = [&](size_t depth) {
      if (!complete) return;
      if (nodes++ > node_cap) {
        complete = false;
        return;
      }
      SubSolve s = sub.solve(fix, tol);
      if (s.status == SolveStatus::Infeasible) return;
      if (s.status == SolveStatus::Optimal && depth == nb) {
        best = std::min(best, s.value);
        return;
      }
      if (depth == nb) return;
      if (s.status == SolveStatus::Optimal && s.value >= best - 1e-10 * (1 + std::abs(best))) return;
      for (int v : {0, 1}) {
        fix.push_back(v);
        rec(depth + 1);
        fix.pop_back();
      }
    };
    rec(0);
  } else {
    complete = false;
    std::mt19937_64 rng(opt.rng_seed);
    for (int t = 0; t < opt.samples; ++t) {
      std::vector<int> fix(nb);
      for (auto& v : fix) v = int(rng() & 1);
      SubSolve s = sub.solve(fix, tol);
      if (s.status == SolveStatus::Optimal) best = std::min(best, s.value);
    }
  }
  res.value = best;
  res.exact = complete;
  res.feasible = best < kInf;
  return res;
}

namespace {

struct EdgeColoring {
  const std::vector<std::pair<int, int>>* edges;
  std::vector<std::vector<int>> adjacent;  // edge -> incident edges
  std::vector<int> color;
  long budget;
  long nodes = 0;

  bool assign(size_t e, int num_colors) {
    if (e == edges->size()) return true;
    if (nodes >= budget) return false;
    // canonical pruning: a fresh color may only be the next unused one
    int used_max = 0;
    for (size_t t = 0; t < e; ++t) used_max = std::max(used_max, color[t]);
    int limit = std::min(num_colors, used_max + 1);
    for (int c = 1; c <= limit; ++c) {
      ++nodes;
      bool ok = true;
      for (int other : adjacent[e])
        if (other < int(e) && color[other] == c) {
          ok = false;
          break;
        }
      if (!ok) continue;
      color[e] = c;
      if (assign(e + 1, num_colors)) return true;
      color[e] = 0;
    }
    return false;
  }
};

}  // namespace

ChromaticResult chromatic_index(const Graph& g, long budget) {
  g.validate();
  ChromaticResult res;
  const int ne = static_cast<int>(g.edges.size());
  if (ne == 0) {
    res.lower = res.upper = 0;
    return res;
  }
  int delta = g.max_degree();
  auto deg = g.degrees();

  // Max-degree-first edge order.
  std::vector<int> order(ne);
  for (int e = 0; e < ne; ++e) order[e] = e;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    int da = deg[g.edges[a].first] + deg[g.edges[a].second];
    int db = deg[g.edges[b].first] + deg[g.edges[b].second];
    return da > db;
  });
  std::vector<std::pair<int, int>> ordered(ne);
  for (int e = 0; e < ne; ++e) ordered[e] = g.edges[order[e]];

  EdgeColoring ec;
  ec.edges = &ordered;
  ec.adjacent.assign(ne, {});
  for (int a = 0; a < ne; ++a)
    for (int b = 0; b < ne; ++b) {
      if (a == b) continue;
      auto [u1, v1] = ordered[a];
      auto [u2, v2] = ordered[b];
      if (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2) ec.adjacent[a].push_back(b);
    }
  ec.color.assign(ne, 0);
  ec.budget = budget;

  if (ec.assign(0, delta)) {
    res.lower = res.upper = delta;
    res.nodes = ec.nodes;
    return res;
  }
  bool delta_proved_impossible = ec.nodes < budget;
  long used = ec.nodes;
  ec.color.assign(ne, 0);
  ec.nodes = 0;
  ec.budget = budget - used;
  if (ec.budget > 0 && ec.assign(0, delta + 1)) {
    res.nodes = used + ec.nodes;
    if (delta_proved_impossible) {
      res.lower = res.upper = delta + 1;
      return res;
    }
    res.lower = delta;
    res.upper = delta + 1;
    res.exact = false;
    return res;
  }
  // budget exhausted: fall back to the Vizing interval
  res.lower = delta;
  res.upper = delta + 1;
  res.exact = false;
  res.nodes = used + ec.nodes;
  return res;
}

}  // namespace copsense
