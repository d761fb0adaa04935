#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

using strata::Marginals;
using strata::Matrix;

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double binary_h_min(const Marginals& m) { return std::max(0.0, m.p0[1] - m.p1[1]); }

double binary_h_max(const Marginals& m) { return std::min(m.p0[1], 1.0 - m.p1[1]); }

Matrix binary_coupling_at(const Marginals& m, double h) {
  Matrix pi(2, 2);
  pi(1, 0) = h;
  pi(1, 1) = m.p0[1] - h;
  pi(0, 1) = m.p1[1] - m.p0[1] + h;
  pi(0, 0) = 1.0 - m.p1[1] - h;
  return pi;
}

double hippocratic_eu_diff(const Marginals& m, double lambda, double h) {
  double benefit = m.p1[1] - m.p0[1] + h;  // pi(0,1)
  return benefit - lambda * h;
}

namespace {

template <typename F>
GridOpt grid_opt(const Marginals& m, double step, bool minimize, F value_at) {
  double lo = binary_h_min(m), hi = binary_h_max(m);
  GridOpt best{value_at(lo), lo};
  for (double h = lo;; h += step) {
    if (h > hi) h = hi;
    double v = value_at(h);
    if (minimize ? v < best.value : v > best.value) best = {v, h};
    if (h >= hi) break;
  }
  return best;
}

}  // namespace

GridOpt grid_min_eu_diff(const Marginals& m, double lambda, double step) {
  return grid_opt(m, step, true,
                  [&](double h) { return hippocratic_eu_diff(m, lambda, h); });
}

GridOpt grid_max_eu_diff(const Marginals& m, double lambda, double step) {
  return grid_opt(m, step, false,
                  [&](double h) { return hippocratic_eu_diff(m, lambda, h); });
}

GridOpt grid_min_cost(const Matrix& cost, const Marginals& m, double step) {
  return grid_opt(m, step, true, [&](double h) {
    Matrix pi = binary_coupling_at(m, h);
    double v = 0.0;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) v += pi(a, b) * cost(a, b);
    return v;
  });
}

std::vector<Matrix> enumerate_vertices(const Marginals& m) {
  const std::size_t n = m.size();
  const std::size_t n_cells = n * n;
  const std::size_t k = 2 * n - 1;
  const std::size_t rows = 2 * n;

  std::vector<std::size_t> combo(k);
  for (std::size_t t = 0; t < k; ++t) combo[t] = t;

  std::vector<Matrix> found;
  std::vector<std::vector<double>> a(rows, std::vector<double>(k + 1));

  while (true) {
    // Incidence system restricted to the chosen support, augmented with the
    // marginal masses.
    for (auto& row : a) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t t = 0; t < k; ++t) {
      a[combo[t] / n][t] = 1.0;
      a[n + combo[t] % n][t] = 1.0;
    }
    for (std::size_t r = 0; r < n; ++r) {
      a[r][k] = m.p0[r];
      a[n + r][k] = m.p1[r];
    }

    // Elimination with partial pivoting; a unique solution needs full column
    // rank, anything else is not a basis.
    bool unique = true;
    std::vector<std::size_t> pivot_row(k);
    std::size_t next_row = 0;
    for (std::size_t c = 0; c < k && unique; ++c) {
      std::size_t best = next_row;
      for (std::size_t r = next_row + 1; r < rows; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[best][c])) best = r;
      if (std::fabs(a[best][c]) < 1e-12) {
        unique = false;
        break;
      }
      std::swap(a[best], a[next_row]);
      for (std::size_t r = next_row + 1; r < rows; ++r) {
        if (a[r][c] == 0.0) continue;
        double f = a[r][c] / a[next_row][c];
        for (std::size_t cc = c; cc <= k; ++cc) a[r][cc] -= f * a[next_row][cc];
      }
      pivot_row[c] = next_row;
      ++next_row;
    }
    if (unique) {
      bool consistent = true;
      for (std::size_t r = next_row; r < rows; ++r)
        if (std::fabs(a[r][k]) > 1e-9) consistent = false;

      if (consistent) {
        std::vector<double> x(k);
        for (std::size_t c = k; c-- > 0;) {
          std::size_t r = pivot_row[c];
          double v = a[r][k];
          for (std::size_t cc = c + 1; cc < k; ++cc) v -= a[r][cc] * x[cc];
          x[c] = v / a[r][c];
        }
        bool feasible = true;
        for (double v : x)
          if (v < -1e-9) feasible = false;
        if (feasible) {
          Matrix pi(n, n, 0.0);
          for (std::size_t t = 0; t < k; ++t)
            pi(combo[t] / n, combo[t] % n) = std::max(x[t], 0.0);
          found.push_back(std::move(pi));
        }
      }
    }

    std::size_t t = k;
    while (t > 0 && combo[t - 1] == n_cells - k + (t - 1)) --t;
    if (t == 0) break;
    ++combo[t - 1];
    for (std::size_t s = t; s < k; ++s) combo[s] = combo[s - 1] + 1;
  }

  std::sort(found.begin(), found.end(),
            [](const Matrix& x, const Matrix& y) { return strata::lex_less(x, y); });
  // Round-off can interleave copies of a degenerate vertex with a distinct
  // neighbor, so dedupe against a trailing window rather than only the back.
  std::vector<Matrix> out;
  for (auto& x : found) {
    bool dup = false;
    for (std::size_t back = out.size(); back-- > 0 && out.size() - back <= 64;)
      if (out[back].max_abs_diff(x) <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(x));
  }
  return out;
}

bool lex_less_tol(const Matrix& a, const Matrix& b, double tol) {
  const auto& x = a.flat();
  const auto& y = b.flat();
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (x[k] < y[k] - tol) return true;
    if (x[k] > y[k] + tol) return false;
  }
  return x.size() < y.size();
}

bool same_vertex_set(const std::vector<Matrix>& a, const std::vector<Matrix>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const Matrix& x : a) {
    bool matched = false;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      if (x.max_abs_diff(b[k]) <= tol) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

Marginals random_marginals(std::mt19937_64& rng, std::size_t n) {
  Marginals m;
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<double> p(n);
    double total = 0.0;
    for (double& v : p) {
      v = 0.25 + uniform53(rng);
      total += v;
    }
    for (double& v : p) v /= total;
    (arm == 0 ? m.p0 : m.p1) = std::move(p);
  }
  return m;
}

}  // namespace oracle
