#include "copsense/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "copsense/error.hpp"

namespace copsense {

bool MbqpInstance::is_binary(int col) const {
  return std::binary_search(binaries.begin(), binaries.end(), col);
}

double MbqpInstance::objective(const Eigen::VectorXd& x) const {
  return x.dot(Q * x) + 2.0 * c.dot(x);
}

MbqpInstance MbqpInstance::shifted_rhs(const Eigen::VectorXd& delta) const {
  if (delta.size() != m) fail(ErrorCode::InvalidArgument, "shifted_rhs: delta size mismatch");
  MbqpInstance copy = *this;
  copy.b += delta;
  return copy;
}

std::vector<int> MbqpInstance::complement_rows() const {
  std::vector<int> rows(binaries.size(), -1);
  std::vector<int> comp_col(binaries.size(), -1);
  for (const auto& s : slack_map)
    if (s.kind == SlackEntry::Kind::BinaryComplement) {
      auto it = std::lower_bound(binaries.begin(), binaries.end(), s.ref);
      if (it != binaries.end() && *it == s.ref) comp_col[it - binaries.begin()] = s.col;
    }
  for (size_t k = 0; k < binaries.size(); ++k) {
    int j = binaries[k], w = comp_col[k];
    for (int r = 0; r < m; ++r) {
      if (A(r, j) != 1.0 || b(r) != 1.0) continue;
      // The row must read x_j + x_other = 1 with a dedicated non-binary other.
      int other = -1;
      bool ok = true;
      for (int col = 0; col < n && ok; ++col) {
        if (col == j || A(r, col) == 0.0) continue;
        if (other >= 0 || A(r, col) != 1.0) ok = false;
        else other = col;
      }
      if (!ok || other < 0) continue;
      if (w >= 0 && other != w) continue;
      if (w < 0 && is_binary(other)) continue;
      rows[k] = r;
      break;
    }
    if (rows[k] < 0) fail(ErrorCode::DomainError, "instance: missing complement row for binary column");
  }
  return rows;
}

std::vector<int> MbqpInstance::constraint_rows() const {
  std::vector<int> comp = complement_rows();
  std::set<int> taken(comp.begin(), comp.end());
  std::vector<int> rest;
  for (int r = 0; r < m; ++r)
    if (!taken.count(r)) rest.push_back(r);
  return rest;
}

void MbqpInstance::validate() const {
  if (Q.rows() != n || Q.cols() != n || c.size() != n || A.rows() != m || A.cols() != n || b.size() != m)
    fail(ErrorCode::InvalidArgument, "instance: inconsistent dimensions");
  if (n > 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() != 0.0)
    fail(ErrorCode::InvalidArgument, "instance: Q not exactly symmetric");
  for (size_t k = 0; k < binaries.size(); ++k) {
    int j = binaries[k];
    if (j < 0 || j >= n) fail(ErrorCode::InvalidArgument, "instance: binary index out of range");
    if (k > 0 && binaries[k - 1] >= j)
      fail(ErrorCode::InvalidArgument, "instance: binary indices not strictly increasing");
  }
  complement_rows();  // throws if any is missing
}

void Graph::validate() const {
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      fail(ErrorCode::InvalidArgument, "graph: endpoint out of range");
    if (u == v) fail(ErrorCode::InvalidArgument, "graph: loop edge");
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second) fail(ErrorCode::InvalidArgument, "graph: duplicate edge");
  }
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(num_vertices, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

int Graph::max_degree() const {
  auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

MbqpInstance to_standard_form(const RawProblem& raw) {
  const int n0 = static_cast<int>(raw.c.size());
  if (raw.Q.rows() != n0 || raw.Q.cols() != n0)
    fail(ErrorCode::InvalidArgument, "to_standard_form: Q/c dimension mismatch");
  const int m0 = static_cast<int>(raw.constraints.size());
  for (int r = 0; r < m0; ++r) {
    const auto& cons = raw.constraints[r];
    if (cons.row.size() != n0)
      fail(ErrorCode::InvalidArgument,
           "to_standard_form: constraint " + std::to_string(r) + " has wrong width");
    if (cons.rel != '<' && cons.rel != '=' && cons.rel != '>')
      fail(ErrorCode::InvalidArgument,
           "to_standard_form: constraint " + std::to_string(r) + " has bad relation");
  }
  std::vector<int> binaries = raw.binaries;
  std::sort(binaries.begin(), binaries.end());
  binaries.erase(std::unique(binaries.begin(), binaries.end()), binaries.end());
  for (int j : binaries)
    if (j < 0 || j >= n0) fail(ErrorCode::InvalidArgument, "to_standard_form: binary index out of range");

  // Reuse an existing complement row x_j + w = 1 when the input already has
  // one with a dedicated zero-cost column; keeps the conversion idempotent.
  auto col_is_dedicated = [&](int k, int host_row) {
    if (k < 0 || k >= n0) return false;
    if (raw.c(k) != 0.0) return false;
    if (raw.Q.col(k).cwiseAbs().maxCoeff() > 0.0) return false;
    for (int r = 0; r < m0; ++r) {
      if (r == host_row) continue;
      if (raw.constraints[r].row(k) != 0.0) return false;
    }
    return true;
  };
  std::vector<int> existing_comp(binaries.size(), -1);
  for (size_t bi = 0; bi < binaries.size(); ++bi) {
    int j = binaries[bi];
    for (int r = 0; r < m0 && existing_comp[bi] < 0; ++r) {
      const auto& cons = raw.constraints[r];
      if (cons.rel != '=' || cons.rhs != 1.0 || cons.row(j) != 1.0) continue;
      int other = -1;
      bool ok = true;
      for (int k = 0; k < n0 && ok; ++k) {
        if (cons.row(k) == 0.0 || k == j) continue;
        if (other >= 0 || cons.row(k) != 1.0) ok = false;
        else other = k;
      }
      if (!ok || other < 0) continue;
      if (std::binary_search(binaries.begin(), binaries.end(), other)) continue;
      if (col_is_dedicated(other, r)) existing_comp[bi] = other;
    }
  }

  int num_new_comp = 0;
  for (size_t bi = 0; bi < binaries.size(); ++bi)
    if (existing_comp[bi] < 0) ++num_new_comp;
  int num_slacks = 0;
  for (const auto& cons : raw.constraints)
    if (cons.rel != '=') ++num_slacks;

  MbqpInstance inst;
  inst.n = n0 + num_new_comp + num_slacks;
  inst.m = m0 + num_new_comp;
  inst.Q = Eigen::MatrixXd::Zero(inst.n, inst.n);
  inst.Q.topLeftCorner(n0, n0) = 0.5 * (raw.Q + raw.Q.transpose());
  inst.c = Eigen::VectorXd::Zero(inst.n);
  inst.c.head(n0) = raw.c;
  inst.A = Eigen::MatrixXd::Zero(inst.m, inst.n);
  inst.b = Eigen::VectorXd::Zero(inst.m);
  inst.binaries = binaries;

  // New complement rows first, in binary order.
  int row = 0;
  int col = n0;
  for (size_t bi = 0; bi < binaries.size(); ++bi) {
    if (existing_comp[bi] >= 0) {
      inst.slack_map.push_back({existing_comp[bi], SlackEntry::Kind::BinaryComplement, binaries[bi]});
      continue;
    }
    inst.A(row, binaries[bi]) = 1.0;
    inst.A(row, col) = 1.0;
    inst.b(row) = 1.0;
    inst.slack_map.push_back({col, SlackEntry::Kind::BinaryComplement, binaries[bi]});
    ++row;
    ++col;
  }
  for (int r = 0; r < m0; ++r) {
    const auto& cons = raw.constraints[r];
    inst.A.block(row, 0, 1, n0) = cons.row.transpose();
    inst.b(row) = cons.rhs;
    if (cons.rel == '<') {
      inst.A(row, col) = 1.0;
      inst.slack_map.push_back({col, SlackEntry::Kind::InequalitySlack, r});
      ++col;
    } else if (cons.rel == '>') {
      inst.A(row, col) = -1.0;
      inst.slack_map.push_back({col, SlackEntry::Kind::InequalitySlack, r});
      ++col;
    }
    ++row;
  }
  inst.validate();
  return inst;
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool bernoulli(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace

MbqpInstance generate_comb(std::uint64_t seed, double density, int side, int card_rhs) {
  if (density < 0 || density > 1 || side < 1 || card_rhs < 0)
    fail(ErrorCode::InvalidArgument, "generate_comb: bad parameters");
  std::mt19937_64 rng(seed);
  const int nv = 2 * side;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      if (bernoulli(rng, density)) edges.emplace_back(i, side + j);
  Eigen::VectorXd weight(nv);
  for (int v = 0; v < nv; ++v) weight(v) = uniform_int(rng, 0, 10);

  RawProblem raw;
  raw.Q = Eigen::MatrixXd::Zero(nv, nv);
  raw.c = -0.5 * weight;  // objective -weight'x written as 2c'x
  RawConstraint card;
  card.row = Eigen::VectorXd::Ones(nv);
  card.rel = '<';
  card.rhs = card_rhs;
  raw.constraints.push_back(card);
  for (auto [u, v] : edges) {
    RawConstraint e;
    e.row = Eigen::VectorXd::Zero(nv);
    e.row(u) = 1;
    e.row(v) = 1;
    e.rel = '<';
    e.rhs = 1;
    raw.constraints.push_back(e);
  }
  for (int v = 0; v < nv; ++v) raw.binaries.push_back(v);

  MbqpInstance inst = to_standard_form(raw);
  inst.seed_info.present = true;
  inst.seed_info.family = "COMB";
  inst.seed_info.seed = seed;
  inst.seed_info.params = {{"density", density}, {"side", double(side)}, {"card_rhs", double(card_rhs)}};
  return inst;
}

namespace {

MbqpInstance generate_switched(std::uint64_t seed, double density, int n, int m, bool quadratic) {
  if (density < 0 || density > 1 || n < 1 || m < 1)
    fail(ErrorCode::InvalidArgument, "generator: bad parameters");
  std::mt19937_64 rng(seed);
  Eigen::VectorXd cx(n);
  for (int j = 0; j < n; ++j) cx(j) = uniform_int(rng, 0, 10);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd brow(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = uniform_int(rng, 0, 10);
    for (int j = 0; j < n; ++j)
      if (bernoulli(rng, density)) a(i, j) = 0;  // zero rows kept as-is (b=0)
    brow(i) = std::floor(0.5 * a.row(i).sum());
  }
  Eigen::MatrixXd qx = Eigen::MatrixXd::Zero(n, n);
  if (quadratic) {
    for (int t = 0; t < 2; ++t) {
      Eigen::VectorXd u(n);
      for (int j = 0; j < n; ++j) u(j) = uniform_int(rng, -1, 1);
      qx += u * u.transpose();
    }
  }

  const int nv = 2 * n;  // x block then y block
  RawProblem raw;
  raw.Q = Eigen::MatrixXd::Zero(nv, nv);
  raw.Q.topLeftCorner(n, n) = qx;
  raw.c = Eigen::VectorXd::Zero(nv);
  raw.c.head(n) = -cx;                       // -2 cx' x
  raw.c.tail(n) = Eigen::VectorXd::Constant(n, 3.0);  // +2 cy' y with cy = 3
  for (int i = 0; i < m; ++i) {
    RawConstraint r;
    r.row = Eigen::VectorXd::Zero(nv);
    r.row.head(n) = a.row(i).transpose();
    r.rel = '<';
    r.rhs = brow(i);
    raw.constraints.push_back(r);
  }
  for (int j = 0; j < n; ++j) {
    RawConstraint link;
    link.row = Eigen::VectorXd::Zero(nv);
    link.row(j) = 1;
    link.row(n + j) = -1;
    link.rel = '<';
    link.rhs = 0;
    raw.constraints.push_back(link);
  }
  for (int j = 0; j < n; ++j) raw.binaries.push_back(n + j);

  MbqpInstance inst = to_standard_form(raw);
  inst.seed_info.present = true;
  inst.seed_info.family = quadratic ? "SSQP" : "SSLP";
  inst.seed_info.seed = seed;
  inst.seed_info.params = {{"density", density}, {"n", double(n)}, {"m", double(m)}};
  return inst;
}

}  // namespace

MbqpInstance generate_sslp(std::uint64_t seed, double density, int n, int m) {
  return generate_switched(seed, density, n, m, false);
}

MbqpInstance generate_ssqp(std::uint64_t seed, double density, int n, int m) {
  return generate_switched(seed, density, n, m, true);
}

MbqpInstance reduce_edge_coloring(const Graph& g, int colors, int rhs) {
  g.validate();
  if (colors < 1) fail(ErrorCode::InvalidArgument, "reduce_edge_coloring: need at least one color");
  const int ne = static_cast<int>(g.edges.size());
  const int nv = ne * colors + colors;  // x_{e,i} then w_i
  auto xcol = [&](int e, int i) { return e * colors + i; };
  auto wcol = [&](int i) { return ne * colors + i; };

  RawProblem raw;
  raw.Q = Eigen::MatrixXd::Zero(nv, nv);
  raw.c = Eigen::VectorXd::Zero(nv);
  for (int i = 0; i < colors; ++i) raw.c(wcol(i)) = 0.5;  // objective sum_i w_i

  for (int e = 0; e < ne; ++e) {
    RawConstraint r;
    r.row = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < colors; ++i) r.row(xcol(e, i)) = 1;
    r.rel = '=';
    r.rhs = 1;
    raw.constraints.push_back(r);
  }
  // Incident edge pairs share a vertex; one row per pair per color.
  for (int e1 = 0; e1 < ne; ++e1)
    for (int e2 = e1 + 1; e2 < ne; ++e2) {
      auto [a1, b1] = g.edges[e1];
      auto [a2, b2] = g.edges[e2];
      if (a1 != a2 && a1 != b2 && b1 != a2 && b1 != b2) continue;
      for (int i = 0; i < colors; ++i) {
        RawConstraint r;
        r.row = Eigen::VectorXd::Zero(nv);
        r.row(xcol(e1, i)) = 1;
        r.row(xcol(e2, i)) = 1;
        r.row(wcol(i)) = -1;
        r.rel = '<';
        r.rhs = 0;
        raw.constraints.push_back(r);
      }
    }
  RawConstraint card;
  card.row = Eigen::VectorXd::Zero(nv);
  for (int i = 0; i < colors; ++i) card.row(wcol(i)) = -1;
  card.rel = '<';
  card.rhs = -rhs;
  raw.constraints.push_back(card);

  for (int j = 0; j < nv; ++j) raw.binaries.push_back(j);
  MbqpInstance inst = to_standard_form(raw);
  inst.seed_info.present = true;
  inst.seed_info.family = "EdgeColor";
  inst.seed_info.seed = 0;
  inst.seed_info.params = {{"colors", double(colors)}, {"rhs", double(rhs)},
                           {"edges", double(ne)}, {"vertices", double(g.num_vertices)}};
  return inst;
}

}  // namespace copsense
