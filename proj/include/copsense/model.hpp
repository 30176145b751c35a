#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "copsense/config.hpp"

namespace copsense {

/// Provenance of one appended column in a standard-form instance.
struct SlackEntry {
  enum class Kind { BinaryComplement, InequalitySlack };
  int col = 0;   // 0-based column in the standard form
  Kind kind = Kind::InequalitySlack;
  int ref = 0;   // complemented binary column, or original constraint index
};

struct SeedInfo {
  bool present = false;
  std::string family;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
};

/// Standard-form mixed binary quadratic program:
///   min x'Qx + 2c'x  s.t.  A x = b, x >= 0, x_j binary for j in binaries.
/// Every binary column has a dedicated complement row x_j + w_j = 1, so the
/// linear relaxation already confines binaries to [0,1].
struct MbqpInstance {
  int n = 0;
  int m = 0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<int> binaries;  // 0-based, strictly increasing
  std::vector<SlackEntry> slack_map;
  SeedInfo seed_info;

  bool is_binary(int col) const;
  /// Throws on any structural invariant violation.
  void validate() const;
  /// Objective value x'Qx + 2c'x.
  double objective(const Eigen::VectorXd& x) const;
  /// Copy with b replaced by b + delta (delta indexed over standard-form rows).
  MbqpInstance shifted_rhs(const Eigen::VectorXd& delta) const;
  /// Row indices that encode x_j + w_j = 1, aligned with `binaries`.
  std::vector<int> complement_rows() const;
  /// Rows that are not complement rows, in order.
  std::vector<int> constraint_rows() const;
};

struct RawConstraint {
  Eigen::VectorXd row;
  char rel = '=';  // '<', '=', '>'
  double rhs = 0.0;
};

/// User-facing pre-standard-form problem: min x'Qx + 2c'x over x >= 0 with
/// arbitrary relational constraints and a binary index set.
struct RawProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  std::vector<RawConstraint> constraints;
  std::vector<int> binaries;
};

struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, stored with u < v

  void validate() const;
  int max_degree() const;
  std::vector<int> degrees() const;
};

/// Equality standard form: inequality rows gain fresh slacks, every binary
/// without a dedicated complement row gains one (prepended, in binary order).
/// Column order: original variables, binary complements, inequality slacks.
MbqpInstance to_standard_form(const RawProblem& raw);

/// Weighted stable set on a random bipartite graph with a cardinality row.
MbqpInstance generate_comb(std::uint64_t seed, double density, int side, int card_rhs);
/// Fixed-charge style instances: continuous x switched by binary y.
MbqpInstance generate_sslp(std::uint64_t seed, double density, int n, int m);
/// Same with a PSD rank-2 quadratic on the continuous block.
MbqpInstance generate_ssqp(std::uint64_t seed, double density, int n, int m);

/// Edge-coloring feasibility program: color usage indicators w_i, assignment
/// variables per edge/color, and a cardinality row sum_i -w_i <= -rhs.
MbqpInstance reduce_edge_coloring(const Graph& g, int colors, int rhs);

}  // namespace copsense
