#include "strata/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace strata {

std::string MarginalsIssue::message() const {
  std::ostringstream msg;
  if (kind == MarginalsIssueKind::NegativeMass) {
    msg << "arm " << arm << " marginal has negative mass " << residual << " at index " << index;
  } else {
    msg << "arm " << arm << " marginal mass deviates from 1 by " << residual;
  }
  return msg.str();
}

std::optional<MarginalsIssue> validate_marginals(const Marginals& m) {
  if (m.p0.empty() || m.p0.size() != m.p1.size())
    throw std::invalid_argument("marginals must be nonempty vectors of equal length");
  for (int arm = 0; arm < 2; ++arm) {
    const auto& p = arm == 0 ? m.p0 : m.p1;
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!std::isfinite(p[k]) || p[k] < -kProbTol)
        return MarginalsIssue{MarginalsIssueKind::NegativeMass, arm, k, p[k]};
      sum += p[k];
    }
    if (std::fabs(sum - 1.0) > kProbTol)
      return MarginalsIssue{MarginalsIssueKind::MassNotOne, arm, 0, sum - 1.0};
  }
  return std::nullopt;
}

void require_valid(const Marginals& m) {
  if (auto issue = validate_marginals(m)) throw std::invalid_argument(issue->message());
}

CellBounds cell_bounds(const Marginals& m, std::size_t a, std::size_t b) {
  require_valid(m);
  if (a >= m.size() || b >= m.size())
    throw std::out_of_range("cell index out of range for marginals");
  double lo = std::max(0.0, m.p0[a] + m.p1[b] - 1.0);
  double hi = std::min(m.p0[a], m.p1[b]);
  if (lo > hi) lo = hi;  // round-off guard at the degenerate corner
  return CellBounds{lo, hi};
}

Coupling product_coupling(const Marginals& m) {
  require_valid(m);
  std::size_t n = m.size();
  Matrix pi(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) pi(a, b) = m.p0[a] * m.p1[b];
  return Coupling(std::move(pi));
}

double harm_mass(const Coupling& pi) {
  double s = 0.0;
  for (std::size_t a = 0; a < pi.outcomes(); ++a)
    for (std::size_t b = 0; b < a; ++b) s += pi(a, b);
  return s;
}

namespace {

// --- transportation simplex -------------------------------------------------
//
// Costs are vectors compared lexicographically: component 0 is the real
// objective, component 1 + cell_index is the unit weight of that cell. The
// lexicographic tail steers the solve, among all optimal couplings, to the
// row-major lexicographically smallest one, so results are deterministic.
// The tail components stay small integers throughout, hence exact in double.

using LexVec = std::vector<double>;

int lex_sign(const LexVec& r, double primary_tol) {
  if (r[0] < -primary_tol) return -1;
  if (r[0] > primary_tol) return 1;
  for (std::size_t k = 1; k < r.size(); ++k) {
    if (r[k] < 0.0) return -1;
    if (r[k] > 0.0) return 1;
  }
  return 0;
}

void lex_sub(LexVec& a, const LexVec& b) {
  for (std::size_t k = 0; k < a.size(); ++k) a[k] -= b[k];
}

Matrix solve_transport(const Matrix& cost, const Marginals& m) {
  const std::size_t n_rows = m.p0.size();
  const std::size_t n_cols = m.p1.size();
  const std::size_t n_cells = n_rows * n_cols;
  const std::size_t q = 1 + n_cells;

  double scale = 1.0;
  for (double v : cost.flat()) scale = std::max(scale, std::fabs(v));
  const double primary_tol = 1e-11 * scale;

  auto cell_id = [n_cols](std::size_t i, std::size_t j) { return i * n_cols + j; };
  auto cvec = [&](std::size_t i, std::size_t j) {
    LexVec c(q, 0.0);
    c[0] = cost(i, j);
    c[1 + cell_id(i, j)] = 1.0;
    return c;
  };

  // Initial basis by the northwest-corner rule: a staircase spanning tree
  // with exactly n_rows + n_cols - 1 basic cells (degenerate zeros allowed).
  Matrix x(n_rows, n_cols, 0.0);
  std::vector<std::vector<bool>> basic(n_rows, std::vector<bool>(n_cols, false));
  {
    std::vector<double> ra = m.p0, rb = m.p1;
    std::size_t i = 0, j = 0;
    for (std::size_t step = 0; step + 1 < n_rows + n_cols; ++step) {
      basic[i][j] = true;
      double t = std::min(ra[i], rb[j]);
      x(i, j) = t;
      ra[i] -= t;
      rb[j] -= t;
      if (i + 1 == n_rows)
        ++j;
      else if (j + 1 == n_cols)
        ++i;
      else if (ra[i] <= rb[j])
        ++i;
      else
        ++j;
    }
  }

  // Node ids: rows are 0..n_rows-1, columns n_rows..n_rows+n_cols-1.
  const std::size_t n_nodes = n_rows + n_cols;
  std::vector<LexVec> pot_row(n_rows), pot_col(n_cols);

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n_nodes);
  auto rebuild_adjacency = [&]() {
    for (auto& lst : adj) lst.clear();
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j)
        if (basic[i][j]) {
          adj[i].push_back({i, j});
          adj[n_rows + j].push_back({i, j});
        }
  };

  auto compute_potentials = [&]() {
    for (auto& p : pot_row) p.clear();
    for (auto& p : pot_col) p.clear();
    pot_row[0] = LexVec(q, 0.0);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    while (!frontier.empty()) {
      std::size_t node = frontier.front();
      frontier.pop();
      for (auto [i, j] : adj[node]) {
        if (node < n_rows && pot_col[j].empty()) {
          LexVec v = cvec(i, j);
          lex_sub(v, pot_row[i]);
          pot_col[j] = std::move(v);
          frontier.push(n_rows + j);
        } else if (node >= n_rows && pot_row[i].empty()) {
          LexVec u = cvec(i, j);
          lex_sub(u, pot_col[j]);
          pot_row[i] = std::move(u);
          frontier.push(i);
        }
      }
    }
  };

  const int max_pivots = 200000;
  for (int pivot = 0;; ++pivot) {
    if (pivot >= max_pivots)
      throw std::runtime_error("transportation simplex failed to converge");
    rebuild_adjacency();
    compute_potentials();

    // Entering cell: Bland's rule, first lexicographically negative reduced
    // cost in row-major order.
    std::size_t ei = n_rows, ej = n_cols;
    for (std::size_t i = 0; i < n_rows && ei == n_rows; ++i)
      for (std::size_t j = 0; j < n_cols; ++j) {
        if (basic[i][j]) continue;
        LexVec r = cvec(i, j);
        lex_sub(r, pot_row[i]);
        lex_sub(r, pot_col[j]);
        if (lex_sign(r, primary_tol) < 0) {
          ei = i;
          ej = j;
          break;
        }
      }
    if (ei == n_rows) break;  // optimal

    // Unique tree path from row ei to column ej; with the entering cell it
    // closes the pivot cycle.
    std::vector<int> parent(n_nodes, -1);
    std::vector<std::pair<std::size_t, std::size_t>> via(n_nodes);
    std::queue<std::size_t> bfs;
    bfs.push(ei);
    parent[ei] = static_cast<int>(ei);
    while (!bfs.empty()) {
      std::size_t node = bfs.front();
      bfs.pop();
      if (node == n_rows + ej) break;
      for (auto [i, j] : adj[node]) {
        std::size_t next = node < n_rows ? n_rows + j : i;
        if (parent[next] == -1) {
          parent[next] = static_cast<int>(node);
          via[next] = {i, j};
          bfs.push(next);
        }
      }
    }

    std::vector<std::pair<std::size_t, std::size_t>> path;  // from col ej back to row ei
    for (std::size_t node = n_rows + ej; node != ei;
         node = static_cast<std::size_t>(parent[node]))
      path.push_back(via[node]);

    // Signs alternate around the cycle, + at the entering cell.
    std::vector<std::pair<std::size_t, std::size_t>> minus_cells, plus_cells;
    plus_cells.push_back({ei, ej});
    for (std::size_t k = 0; k < path.size(); ++k)
      (k % 2 == 0 ? minus_cells : plus_cells).push_back(path[k]);

    // Leaving cell: smallest basic value on the minus positions, ties broken
    // by smallest cell index (Bland again, so the walk cannot cycle).
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave_i = 0, leave_j = 0, leave_id = n_cells;
    for (auto [i, j] : minus_cells) {
      double v = x(i, j);
      std::size_t id = cell_id(i, j);
      if (v < theta || (v == theta && id < leave_id)) {
        theta = v;
        leave_i = i;
        leave_j = j;
        leave_id = id;
      }
    }

    for (auto [i, j] : plus_cells) x(i, j) += theta;
    for (auto [i, j] : minus_cells) x(i, j) -= theta;
    x(leave_i, leave_j) = 0.0;
    basic[leave_i][leave_j] = false;
    basic[ei][ej] = true;
  }

  return x;
}

double plan_value(const Matrix& cost, const Matrix& plan) {
  double v = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j) v += plan(i, j) * cost(i, j);
  return v;
}

}  // namespace

TransportResult min_expectation(const Matrix& cost, const Marginals& m) {
  require_valid(m);
  if (cost.rows() != m.size() || cost.cols() != m.size())
    throw std::invalid_argument("cost matrix shape must match the marginals");
  if (!cost.all_finite()) throw std::invalid_argument("cost matrix entries must be finite");
  Matrix plan = solve_transport(cost, m);
  return TransportResult{plan_value(cost, plan), Coupling(std::move(plan))};
}

TransportResult max_expectation(const Matrix& cost, const Marginals& m) {
  require_valid(m);
  if (cost.rows() != m.size() || cost.cols() != m.size())
    throw std::invalid_argument("cost matrix shape must match the marginals");
  if (!cost.all_finite()) throw std::invalid_argument("cost matrix entries must be finite");
  Matrix plan = solve_transport(-cost, m);
  return TransportResult{plan_value(cost, plan), Coupling(std::move(plan))};
}

HarmExtremes extreme_harm_couplings(const Marginals& m) {
  require_valid(m);
  std::size_t n = m.size();
  Matrix harm(n, n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < a; ++b) harm(a, b) = 1.0;
  TransportResult lo = min_expectation(harm, m);
  TransportResult hi = max_expectation(harm, m);
  double lo_mass = std::clamp(lo.value, 0.0, 1.0);
  double hi_mass = std::clamp(hi.value, 0.0, 1.0);
  return HarmExtremes{std::move(lo.coupling), std::move(hi.coupling), lo_mass, hi_mass};
}

std::vector<Coupling> vertices(const Marginals& m) {
  require_valid(m);
  const std::size_t n = m.size();
  const std::size_t n_cells = n * n;
  if (n_cells > 25) {
    std::ostringstream msg;
    msg << "outcome space too large for vertex enumeration: |Y|^2 = " << n_cells << " > 25";
    throw std::invalid_argument(msg.str());
  }

  // Every vertex is the unique solution supported on some spanning tree of
  // the bipartite row/column graph, so enumerate cell subsets of size
  // 2n - 1, keep the spanning trees, and solve each by leaf peeling.
  const std::size_t k = 2 * n - 1;
  const std::size_t n_nodes = 2 * n;
  std::vector<std::size_t> combo(k);
  for (std::size_t t = 0; t < k; ++t) combo[t] = t;

  std::vector<int> uf(n_nodes);
  std::vector<std::size_t> deg(n_nodes);
  std::vector<double> node_mass(n_nodes);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> incident(n_nodes);
  std::vector<Matrix> found;

  auto uf_find = [&](int a) {
    while (uf[a] != a) a = uf[a] = uf[uf[a]];
    return a;
  };

  while (true) {
    // Spanning-tree test on the chosen cells.
    for (std::size_t t = 0; t < n_nodes; ++t) uf[t] = static_cast<int>(t);
    bool acyclic = true;
    for (std::size_t t = 0; t < k && acyclic; ++t) {
      int ra = uf_find(static_cast<int>(combo[t] / n));
      int rb = uf_find(static_cast<int>(n + combo[t] % n));
      if (ra == rb)
        acyclic = false;
      else
        uf[ra] = rb;
    }
    if (acyclic) {  // k = n_nodes - 1 acyclic edges always span
      for (std::size_t t = 0; t < n_nodes; ++t) {
        incident[t].clear();
        deg[t] = 0;
        node_mass[t] = t < n ? m.p0[t] : m.p1[t - n];
      }
      for (std::size_t t = 0; t < k; ++t) {
        std::size_t a = combo[t] / n, b = combo[t] % n;
        incident[a].push_back({a, b});
        incident[n + b].push_back({a, b});
        ++deg[a];
        ++deg[n + b];
      }

      Matrix x(n, n, 0.0);
      std::vector<bool> solved_cell(n_cells, false);
      std::vector<std::size_t> leaves;
      for (std::size_t t = 0; t < n_nodes; ++t)
        if (deg[t] == 1) leaves.push_back(t);
      bool feasible = true;
      std::size_t peeled = 0;
      while (!leaves.empty()) {
        std::size_t node = leaves.back();
        leaves.pop_back();
        if (deg[node] != 1) continue;
        std::pair<std::size_t, std::size_t> cell{0, 0};
        for (auto c : incident[node])
          if (!solved_cell[c.first * n + c.second]) cell = c;
        double v = node_mass[node];
        if (v < -kProbTol) {
          feasible = false;
          break;
        }
        x(cell.first, cell.second) = std::max(v, 0.0);
        solved_cell[cell.first * n + cell.second] = true;
        ++peeled;
        std::size_t other = node == cell.first ? n + cell.second : cell.first;
        node_mass[node] = 0.0;
        node_mass[other] -= v;
        --deg[node];
        --deg[other];
        if (deg[other] == 1) leaves.push_back(other);
      }
      if (feasible && peeled == k) found.push_back(std::move(x));
    }

    // Next combination in lexicographic order.
    std::size_t t = k;
    while (t > 0 && combo[t - 1] == n_cells - k + (t - 1)) --t;
    if (t == 0) break;
    ++combo[t - 1];
    for (std::size_t s = t; s < k; ++s) combo[s] = combo[s - 1] + 1;
  }

  std::sort(found.begin(), found.end(), [](const Matrix& a, const Matrix& b) {
    return lex_less(a, b);
  });
  // Copies of a degenerate vertex differ by round-off and need not sort
  // adjacent, so dedupe against a trailing window.
  std::vector<Coupling> out;
  for (auto& x : found) {
    bool dup = false;
    for (std::size_t back = out.size(); back-- > 0 && out.size() - back <= 64;)
      if (out[back].matrix().max_abs_diff(x) <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(Coupling(std::move(x)));
  }
  return out;
}

namespace {

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<Coupling> random_couplings(const Marginals& m, std::size_t count,
                                       std::uint64_t seed) {
  std::vector<Coupling> verts = vertices(m);
  // Exponential spacings normalize to symmetric Dirichlet weights. Drawn by
  // hand from the raw engine so the sequence is identical across platforms.
  std::mt19937_64 rng(seed);
  std::vector<Coupling> out;
  out.reserve(count);
  std::size_t n = m.size();
  for (std::size_t draw = 0; draw < count; ++draw) {
    std::vector<double> w(verts.size());
    double total = 0.0;
    for (double& wk : w) {
      wk = -std::log1p(-uniform53(rng));
      total += wk;
    }
    Matrix pi(n, n, 0.0);
    for (std::size_t k = 0; k < verts.size(); ++k) {
      double wk = w[k] / total;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) pi(a, b) += wk * verts[k](a, b);
    }
    out.push_back(Coupling(std::move(pi)));
  }
  return out;
}

}  // namespace strata
