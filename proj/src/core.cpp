#include "strata/core.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace strata {

OutcomeSpace OutcomeSpace::binary() {
  return OutcomeSpace{{"death", "survival"}, {0.0, 1.0}};
}

void OutcomeSpace::validate() const {
  if (labels.size() < 2) throw std::invalid_argument("outcome space needs at least 2 outcomes");
  if (values.size() != labels.size())
    throw std::invalid_argument("outcome labels and values must have equal length");
  for (std::size_t k = 0; k + 1 < values.size(); ++k)
    if (!(values[k] < values[k + 1]))
      throw std::invalid_argument("outcome values must be strictly increasing");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw std::invalid_argument("outcome labels must be unique");
}

void ArmPair::validate() const {
  if (label0.empty() || label1.empty()) throw std::invalid_argument("arm labels must be nonempty");
  if (label0 == label1) throw std::invalid_argument("arm labels must be distinct");
}

void Stratum::validate(const OutcomeSpace& space) const {
  if (y0 >= space.size() || y1 >= space.size())
    throw std::invalid_argument("stratum index out of range for outcome space");
}

Coupling::Coupling(Matrix pi) : pi_(std::move(pi)) {
  if (pi_.rows() == 0 || pi_.rows() != pi_.cols())
    throw std::invalid_argument("coupling matrix must be square and nonempty");
  for (std::size_t a = 0; a < pi_.rows(); ++a)
    for (std::size_t b = 0; b < pi_.cols(); ++b) {
      double v = pi_(a, b);
      if (!std::isfinite(v) || v < -kProbTol) {
        std::ostringstream msg;
        msg << "coupling has negative mass " << v << " at cell (" << a << "," << b << ")";
        throw std::invalid_argument(msg.str());
      }
      if (v < 0.0) pi_(a, b) = 0.0;
    }
  double mass = pi_.sum();
  if (std::fabs(mass - 1.0) > kProbTol) {
    std::ostringstream msg;
    msg << "coupling mass is " << mass << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

bool Coupling::consistent_with(const Marginals& m, double tol) const {
  if (m.size() != pi_.rows() || m.p1.size() != pi_.cols()) return false;
  auto rows = pi_.row_sums();
  auto cols = pi_.col_sums();
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (std::fabs(rows[k] - m.p0[k]) > tol) return false;
  for (std::size_t k = 0; k < cols.size(); ++k)
    if (std::fabs(cols[k] - m.p1[k]) > tol) return false;
  return true;
}

UtilityTable::UtilityTable(Matrix u0, Matrix u1) : u_{std::move(u0), std::move(u1)} {
  if (u_[0].rows() != u_[0].cols() || u_[1].rows() != u_[1].cols() ||
      u_[0].rows() != u_[1].rows() || u_[0].rows() == 0)
    throw std::invalid_argument("utility table must hold two square matrices of equal size");
  if (!u_[0].all_finite() || !u_[1].all_finite())
    throw std::invalid_argument("utility table entries must be finite");
}

void HippocraticSpec::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw std::invalid_argument("lambda must be finite and >= 0");
}

UtilityTable make_hippocratic(const HippocraticSpec& spec, const OutcomeSpace& space) {
  spec.validate();
  space.validate();
  std::size_t n = space.size();
  Matrix u0(n, n, 0.0);
  Matrix u1(n, n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (space.values[b] > space.values[a])
        u1(a, b) = 1.0;
      else if (space.values[b] < space.values[a])
        u1(a, b) = -spec.lambda;
    }
  return UtilityTable(std::move(u0), std::move(u1));
}

double expected_utility(const UtilityTable& u, int d, const Coupling& pi) {
  if (d != 0 && d != 1) throw std::invalid_argument("arm index must be 0 or 1");
  if (u.outcomes() != pi.outcomes())
    throw std::invalid_argument("utility table and coupling dimensions disagree");
  double s = 0.0;
  for (std::size_t a = 0; a < pi.outcomes(); ++a)
    for (std::size_t b = 0; b < pi.outcomes(); ++b) s += pi(a, b) * u(d, a, b);
  return s;
}

double eu_difference(const UtilityTable& u, const Coupling& pi) {
  return expected_utility(u, 1, pi) - expected_utility(u, 0, pi);
}

}  // namespace strata
