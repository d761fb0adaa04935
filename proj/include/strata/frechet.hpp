#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "strata/core.hpp"

namespace strata {

enum class MarginalsIssueKind { NegativeMass, MassNotOne };

struct MarginalsIssue {
  MarginalsIssueKind kind;
  int arm;            // 0 or 1
  std::size_t index;  // offending entry (NegativeMass); unused for MassNotOne
  double residual;    // the negative entry, or sum - 1
  std::string message() const;
};

// ok (nullopt) iff both vectors are probability distributions at 1e-12.
std::optional<MarginalsIssue> validate_marginals(const Marginals& m);

// Throwing form for call sites that cannot proceed on bad input.
void require_valid(const Marginals& m);

// Hard interval for one cell of any coupling consistent with m:
// lo = max(0, p0(a) + p1(b) - 1), hi = min(p0(a), p1(b)). Both ends are
// attained by feasible couplings.
struct CellBounds {
  double lo = 0.0;
  double hi = 0.0;
};
CellBounds cell_bounds(const Marginals& m, std::size_t a, std::size_t b);

// pi(a,b) = p0(a) * p1(b).
Coupling product_coupling(const Marginals& m);

// Mass on the harmed strata {(a,b) : value(b) < value(a)}; indices follow the
// outcome order, so this is the mass strictly below the diagonal.
double harm_mass(const Coupling& pi);

// The couplings attaining the least and the greatest harm mass, found by
// exact optimization of the harm indicator cost. In the binary case the
// least-harm coupling has P10 = max(0, p0(1) - p1(1)); when that is zero the
// monotonicity assumption is attainable. When it is positive, the
// least-harm coupling is still returned rather than an error.
struct HarmExtremes {
  Coupling min_harm;
  Coupling max_harm;
  double min_mass = 0.0;
  double max_mass = 0.0;
};
HarmExtremes extreme_harm_couplings(const Marginals& m);

// Exact linear optimization of sum pi(a,b) * cost(a,b) over the couplings
// consistent with m, by transportation simplex with Bland anti-cycling.
// The returned coupling is a vertex of the transportation polytope; among
// optimal vertices the lexicographically smallest matrix is returned
// (row-major), which makes outputs deterministic.
struct TransportResult {
  double value = 0.0;
  Coupling coupling;
};
TransportResult min_expectation(const Matrix& cost, const Marginals& m);
TransportResult max_expectation(const Matrix& cost, const Marginals& m);

// All extreme points of the transportation polytope, deduplicated at 1e-9
// and sorted lexicographically. Guarded to |Y|^2 <= 25; throws
// std::invalid_argument beyond that.
std::vector<Coupling> vertices(const Marginals& m);

// Random feasible couplings: convex combinations of the enumerated vertices
// with symmetric Dirichlet weights. Feasible by construction; the draw
// sequence is fully determined by the seed.
inline constexpr std::uint64_t kDefaultSeed = 42;
std::vector<Coupling> random_couplings(const Marginals& m, std::size_t count,
                                       std::uint64_t seed = kDefaultSeed);

// The identified set of couplings with the given marginals.
struct FrechetClass {
  Marginals marginals;

  CellBounds bounds(std::size_t a, std::size_t b) const {
    return cell_bounds(marginals, a, b);
  }
  Coupling product() const { return product_coupling(marginals); }
  HarmExtremes harm_extremes() const { return extreme_harm_couplings(marginals); }
  std::vector<Coupling> extreme_points() const { return vertices(marginals); }
  bool contains(const Coupling& pi, double tol = kMarginalTol) const {
    return pi.consistent_with(marginals, tol);
  }
};

}  // namespace strata
