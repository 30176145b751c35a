#pragma once

namespace copsense {

/// Central tolerance record. Every solver reads its thresholds from here so
/// tests and callers can tighten or relax them in one place.
struct Tolerances {
  double lp_feas = 1e-9;        // simplex pivot / feasibility threshold
  double lp_gap = 1e-7;         // LP duality gap, scaled by 1+|obj|
  double qp_residual = 1e-6;    // QP primal/dual (KKT) residual
  double sdp_residual = 1e-6;   // SDP primal/dual/gap residual
  double eig_recon = 1e-9;      // eigendecomposition reconstruction error
  double psd_eig = 1e-7;        // how negative an eigenvalue may be to still count as PSD
  double cop_leaf = 1e-8;       // simplex-partition leaf certification slack
  double cop_witness = 1e-9;    // how negative y'My must be to refute copositivity
  double cert_algebra = 1e-9;   // certificate reconstruction identities
};

inline const Tolerances& default_tol() {
  static const Tolerances t{};
  return t;
}

}  // namespace copsense
