#include "copsense/sdp.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <cstdio>
#include <limits>

#include "copsense/eig.hpp"
#include "copsense/error.hpp"

namespace copsense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

int svec_len(int d) { return d * (d + 1) / 2; }

// Scaled symmetric vectorization: inner products are preserved,
// <A, B> = svec(A) . svec(B).
void svec_into(const Eigen::MatrixXd& m, double* out) {
  int d = static_cast<int>(m.rows());
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) out[k++] = (i == j) ? m(i, j) : kSqrt2 * m(i, j);
}

Eigen::MatrixXd smat(const double* v, int d) {
  Eigen::MatrixXd m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) {
      double val = v[k++];
      if (i == j) {
        m(i, j) = val;
      } else {
        m(i, j) = val / kSqrt2;
        m(j, i) = val / kSqrt2;
      }
    }
  return m;
}

}  // namespace

int SdpProblem::add_scalar(double cost, double lo, double hi) {
  int n = num_scalars();
  scalar_cost.conservativeResize(n + 1);
  scalar_lower.conservativeResize(n + 1);
  scalar_upper.conservativeResize(n + 1);
  scalar_cost(n) = cost;
  scalar_lower(n) = lo;
  scalar_upper(n) = hi;
  return n;
}

int SdpProblem::add_mat(int dim, ConeTag cone) {
  mats.push_back(MatVar{dim, cone, Eigen::MatrixXd()});
  return static_cast<int>(mats.size()) - 1;
}

SdpOutcome solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  const int ns = p.num_scalars();
  const int nb = static_cast<int>(p.mats.size());
  int n = ns;
  std::vector<int> offset(nb);
  for (int b = 0; b < nb; ++b) {
    offset[b] = n;
    n += svec_len(p.mats[b].dim);
  }
  const int m = static_cast<int>(p.rows.size());

  // Assemble cost and constraint matrix in svec coordinates.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.head(ns) = p.scalar_cost;
  for (int b = 0; b < nb; ++b) {
    if (p.mats[b].cost.size() > 0) {
      if (p.mats[b].cost.rows() != p.mats[b].dim)
        fail(ErrorCode::InvalidArgument, "solve_sdp: block cost dimension mismatch");
      svec_into(p.mats[b].cost, c.data() + offset[b]);
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b_rhs(m);
  std::vector<double> row_scale(m, 1.0);
  {
    std::vector<double> buf;
    for (int r = 0; r < m; ++r) {
      const auto& row = p.rows[r];
      double nrm2 = 0;
      std::vector<std::pair<int, double>> entries;
      for (auto [j, v] : row.scalar_terms) {
        if (j < 0 || j >= ns) fail(ErrorCode::InvalidArgument, "solve_sdp: scalar index out of range");
        entries.emplace_back(j, v);
      }
      for (const auto& [bid, coef] : row.mat_terms) {
        if (bid < 0 || bid >= nb) fail(ErrorCode::InvalidArgument, "solve_sdp: block index out of range");
        int d = p.mats[bid].dim;
        if (coef.rows() != d || coef.cols() != d)
          fail(ErrorCode::InvalidArgument, "solve_sdp: row coefficient dimension mismatch");
        buf.resize(svec_len(d));
        svec_into(0.5 * (coef + coef.transpose()), buf.data());
        for (int k = 0; k < svec_len(d); ++k)
          if (buf[k] != 0.0) entries.emplace_back(offset[bid] + k, buf[k]);
      }
      for (auto& [j, v] : entries) nrm2 += v * v;
      double s = nrm2 > 0 ? 1.0 / std::sqrt(nrm2) : 1.0;
      row_scale[r] = s;
      for (auto& [j, v] : entries) trip.emplace_back(r, j, v * s);
      b_rhs(r) = row.rhs * s;
    }
  }
  Eigen::SparseMatrix<double> A(m, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> At = A.transpose();

  // Schur complement of the affine step; independent of the penalty, so the
  // factorization is reused across penalty updates.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  if (m > 0) {
    G = Eigen::MatrixXd(A * At);
    G.diagonal().array() += 1e-10;
  }
  Eigen::LDLT<Eigen::MatrixXd> Gf(G);

  auto project_cone = [&](Eigen::VectorXd& v) {
    for (int j = 0; j < ns; ++j) v(j) = std::min(std::max(v(j), p.scalar_lower(j)), p.scalar_upper(j));
    for (int b = 0; b < nb; ++b) {
      int d = p.mats[b].dim, len = svec_len(d);
      switch (p.mats[b].cone) {
        case ConeTag::Free: break;
        case ConeTag::Nonneg:
          v.segment(offset[b], len) = v.segment(offset[b], len).cwiseMax(0.0);
          break;
        case ConeTag::Psd: {
          Eigen::MatrixXd M = smat(v.data() + offset[b], d);
          svec_into(project_psd(M), v.data() + offset[b]);
          break;
        }
      }
    }
  };

  double rho = 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  project_cone(s);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd s_prev;
  Eigen::VectorXd Ac = m > 0 ? Eigen::VectorXd(A * c) : Eigen::VectorXd(0);

  SdpOutcome out;
  long it = 0;
  std::FILE* log = nullptr;
  if (opt.log_csv && !opt.log_path.empty()) {
    log = std::fopen(opt.log_path.c_str(), "w");
    if (log) std::fprintf(log, "iter,primal_res,dual_res,objective\n");
  }

  const int check_every = 50;
  double pres = kInf, dres = kInf, gap = kInf;
  long stall = 0;

  for (it = 1; it <= opt.max_iter; ++it) {
    Eigen::VectorXd w = s - u;
    if (m > 0) {
      y = Gf.solve(rho * (A * w - b_rhs) - Ac);
      x = w - (c + At * y) / rho;
    } else {
      x = w - c / rho;
    }
    s_prev = s;
    s = x + u;
    project_cone(s);
    u += x - s;

    if (it % check_every != 0) continue;

    double xs_scale = 1 + std::max(x.cwiseAbs().maxCoeff(), s.cwiseAbs().maxCoeff());
    pres = (x - s).cwiseAbs().maxCoeff() / xs_scale;
    double lam_scale = 1 + rho * u.cwiseAbs().maxCoeff();
    dres = rho * (s - s_prev).cwiseAbs().maxCoeff() / lam_scale;
    double pobj = c.dot(s);
    double dobj = m > 0 ? -b_rhs.dot(y) : 0.0;
    gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    if (log) std::fprintf(log, "%ld,%.6e,%.6e,%.10e\n", it, pres, dres, pobj);

    if (pres <= opt.tol && dres <= opt.tol && gap <= opt.tol) {
      out.status = SolveStatus::Optimal;
      break;
    }

    // Divergence-based infeasibility certificate (heuristic): when the primal
    // stops improving and the scaled dual keeps growing, test the normalized
    // equality multiplier as a ray.
    if (m > 0 && pres > opt.tol) {
      ++stall;
      if (stall * check_every > 2000) {
        Eigen::VectorXd yt = -y;
        double ynorm = yt.cwiseAbs().maxCoeff();
        if (ynorm > 1e-12) {
          yt /= ynorm;
          Eigen::VectorXd aty = At * yt;  // candidate dual-cone element: -A'y
          // distance of -A'y from the dual cone, blockwise
          Eigen::VectorXd v = -aty;
          double dist2 = 0;
          for (int j = 0; j < ns; ++j) {
            bool lo0 = p.scalar_lower(j) == 0 && p.scalar_upper(j) == kInf;
            bool fr = p.scalar_lower(j) == -kInf && p.scalar_upper(j) == kInf;
            if (lo0) {
              double d = std::min(0.0, v(j));
              dist2 += d * d;
            } else if (fr) {
              dist2 += v(j) * v(j);
            }
            // bounded scalars impose no cone condition on the ray
          }
          for (int b = 0; b < nb; ++b) {
            int d = p.mats[b].dim, len = svec_len(d);
            Eigen::VectorXd slice = v.segment(offset[b], len);
            if (p.mats[b].cone == ConeTag::Free) {
              dist2 += slice.squaredNorm();
            } else if (p.mats[b].cone == ConeTag::Nonneg) {
              dist2 += slice.cwiseMin(0.0).squaredNorm();
            } else {
              Eigen::MatrixXd M = smat(slice.data(), d);
              Eigen::MatrixXd Mp = project_psd(M);
              dist2 += (M - Mp).squaredNorm();
            }
          }
          double cert_res = std::sqrt(dist2) / (1 + aty.cwiseAbs().maxCoeff());
          double ray_val = b_rhs.dot(yt);
          if (cert_res <= 1e-4 && ray_val > 1e-6) {
            out.status = SolveStatus::Infeasible;
            out.infeasibility_residual = cert_res;
            break;
          }
        }
      }
    } else {
      stall = 0;
    }

    // Residual balancing, factor 2.
    if (pres > 10 * dres) {
      rho = std::min(rho * 2, 1e6);
      u /= 2;
    } else if (dres > 10 * pres) {
      rho = std::max(rho / 2, 1e-6);
      u *= 2;
    }
  }
  if (log) std::fclose(log);

  out.iterations = std::min(it, opt.max_iter);
  if (out.status == SolveStatus::IterLimit && it > opt.max_iter) out.status = SolveStatus::IterLimit;
  out.primal_residual = pres;
  out.dual_residual = dres;
  out.gap_residual = gap;

  // Report the cone-feasible iterate.
  out.scalars = s.head(ns);
  out.mats.resize(nb);
  for (int b = 0; b < nb; ++b) out.mats[b] = smat(s.data() + offset[b], p.mats[b].dim);
  out.objective = c.dot(s);
  out.duals.resize(m);
  for (int r = 0; r < m; ++r) out.duals(r) = -y(r) * row_scale[r];
  return out;
}

Eigen::VectorXd extract_equality_duals(const SdpOutcome& out, const std::vector<int>& row_ids) {
  if (out.status != SolveStatus::Optimal)
    fail(ErrorCode::DomainError, "extract_equality_duals: outcome not optimal");
  Eigen::VectorXd mu(row_ids.size());
  for (size_t k = 0; k < row_ids.size(); ++k) {
    int r = row_ids[k];
    if (r < 0 || r >= out.duals.size())
      fail(ErrorCode::InvalidArgument, "extract_equality_duals: row id out of range");
    mu(k) = out.duals(r);
  }
  return mu;
}

}  // namespace copsense
