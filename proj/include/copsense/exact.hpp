#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "copsense/lp.hpp"
#include "copsense/model.hpp"
#include "copsense/qp.hpp"

namespace copsense {

enum class ExactStatus { Optimal, Infeasible, Unbounded, BudgetExceeded };

const char* to_string(ExactStatus s);

struct ExactResult {
  ExactStatus status = ExactStatus::Infeasible;
  double z = 0.0;           // incumbent value when BudgetExceeded
  Eigen::VectorXd argmin;   // empty unless an incumbent exists
  long nodes = 0;
};

struct ExactOptions {
  long node_budget = 2'000'000;
  bool prune = true;  // disable to cross-check pruning soundness
};

/// Depth-first branch and bound over the binary columns (lowest unfixed index
/// first, 0 before 1), pruned with the continuous relaxation of the partially
/// fixed problem. Requires convexity: Q PSD, or Q supported on the binary
/// block only (handled by an exact diagonal shift in the bounding problem).
ExactResult solve_exact(const MbqpInstance& inst, const ExactOptions& opt = ExactOptions{});

struct ContResult {
  SolveStatus status = SolveStatus::IterLimit;
  double value = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // per standard-form row, value-function convention
};

/// Continuous relaxation (binaries in [0,1], implied by the complement rows).
ContResult solve_cont(const MbqpInstance& inst);

struct ZetaOptions {
  long pattern_cap = 1 << 20;     // enumerate binary patterns up to this count
  int samples = 256;              // sampled mode size when the cap binds
  std::vector<double> box_caps = {1e1, 1e2, 1e3, 1e4};  // nonconvex probe boxes
  std::uint64_t rng_seed = 12345;
};

struct ZetaResult {
  double value = 0.0;
  bool exact = true;      // complete enumeration with convex subproblems
  bool feasible = true;
  std::vector<double> cap_values;  // per-box values from the divergence probe
};

/// Value of the epsilon-perturbed program: rows relaxed to [b_i - eps, b_i + eps],
/// each binary pinned to a box around one of its two values, minimized over all
/// binary patterns. Falls back to a sampled, flagged estimate when enumeration
/// is capped or the objective is nonconvex (growing-box divergence probe).
ZetaResult zeta_probe(const MbqpInstance& inst, double eps, const ZetaOptions& opt = ZetaOptions{});

struct ChromaticResult {
  int lower = 0;
  int upper = 0;
  bool exact = true;
  long nodes = 0;
  int value() const { return upper; }
};

/// Exact edge chromatic number by backtracking, max-degree-first edge order.
/// On budget exhaustion returns the Vizing interval {max degree, +1}.
ChromaticResult chromatic_index(const Graph& g, long budget = 50'000'000);

}  // namespace copsense
