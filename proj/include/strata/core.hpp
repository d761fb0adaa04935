#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "strata/matrix.hpp"

namespace strata {

// Probability tolerances: simplex membership is checked at 1e-12, marginal
// consistency of couplings at 1e-9 (loose enough for LP round-off).
inline constexpr double kProbTol = 1e-12;
inline constexpr double kMarginalTol = 1e-9;

// Finite ordered outcome space. Outcome indices follow the strictly
// increasing scores, so index comparison and score comparison agree.
// The binary case is {death = 0, survival = 1}.
struct OutcomeSpace {
  std::vector<std::string> labels;
  std::vector<double> values;

  static OutcomeSpace binary();

  std::size_t size() const { return labels.size(); }
  void validate() const;  // throws std::invalid_argument
};

// The two available actions, d = 0 and d = 1.
struct ArmPair {
  std::string label0;
  std::string label1;

  const std::string& label(int d) const { return d == 0 ? label0 : label1; }
  void validate() const;
};

// Marginal laws of the two potential outcomes over a shared outcome space.
// This is all a randomized trial identifies.
struct Marginals {
  std::vector<double> p0;
  std::vector<double> p1;

  std::size_t size() const { return p0.size(); }
};

// One principal stratum: the pair of outcome indices (y0, y1).
struct Stratum {
  std::size_t y0 = 0;
  std::size_t y1 = 0;

  void validate(const OutcomeSpace& space) const;
};

// Joint law over (y0, y1): a point of the transportation polytope.
// Construction enforces non-negativity and unit mass at 1e-12; entries in
// [-1e-12, 0) coming from solver round-off are clamped to zero.
class Coupling {
 public:
  explicit Coupling(Matrix pi);

  const Matrix& matrix() const { return pi_; }
  double operator()(std::size_t a, std::size_t b) const { return pi_(a, b); }
  std::size_t outcomes() const { return pi_.rows(); }

  // Row sums equal m.p0 and column sums equal m.p1 within tol.
  bool consistent_with(const Marginals& m, double tol = kMarginalTol) const;

  Coupling transposed() const { return Coupling(pi_.transposed()); }

 private:
  Matrix pi_;
};

// u(d, y0, y1) for the two actions; utility depends on the whole vector of
// potential outcomes, not just the realized one.
class UtilityTable {
 public:
  UtilityTable(Matrix u0, Matrix u1);

  double operator()(int d, std::size_t a, std::size_t b) const { return u_[d](a, b); }
  const Matrix& for_arm(int d) const { return u_[d]; }
  std::size_t outcomes() const { return u_[0].rows(); }

 private:
  std::array<Matrix, 2> u_;
};

// Asymmetry weight for the do-no-harm utility family. Tables are generated
// with the baseline convention u(0,.,.) = 0; only utility differences are
// pinned by the family itself, so maxmin/maxmax values depend on this
// convention (documented, not resolvable from the family alone).
struct HippocraticSpec {
  double lambda = 2.0;

  // Only weights above one penalize treatment harm more than they reward
  // treatment benefit; lambda <= 1 is kept as the symmetric reference case
  // and reported as non-hippocratic.
  bool hippocratic() const { return lambda > 1.0; }
  void validate() const;
};

// u(0,a,b) = 0; u(1,a,b) = +1 when value(b) > value(a), -lambda when
// value(b) < value(a), 0 on ties. Sign-based and magnitude-blind for
// non-binary spaces.
UtilityTable make_hippocratic(const HippocraticSpec& spec, const OutcomeSpace& space);

// Sum over strata of pi(a,b) * u(d,a,b).
double expected_utility(const UtilityTable& u, int d, const Coupling& pi);

// expected_utility(u,1,pi) - expected_utility(u,0,pi). For binary
// hippocratic tables this equals P01 - lambda*P10 exactly.
double eu_difference(const UtilityTable& u, const Coupling& pi);

}  // namespace strata
