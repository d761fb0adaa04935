#include "strata/audits.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace strata {

AdditivityReport additivity_check(const UtilityTable& u, double tol) {
  std::size_t n = u.outcomes();
  for (int d = 0; d < 2; ++d)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t a2 = a + 1; a2 < n; ++a2)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t b2 = b + 1; b2 < n; ++b2) {
            double sd = u(d, a, b) + u(d, a2, b2) - u(d, a, b2) - u(d, a2, b);
            if (std::fabs(sd) > tol)
              return AdditivityReport{false, AdditivityWitness{d, a, a2, b, b2, sd}};
          }
  return AdditivityReport{true, std::nullopt};
}

SufficiencyReport marginal_sufficiency_check(const UtilityTable& u, const Marginals& m,
                                             std::size_t n, std::uint64_t seed) {
  require_valid(m);
  if (u.outcomes() != m.size())
    throw std::invalid_argument("utility table size must match the marginals");
  if (n < 2) throw std::invalid_argument("need at least 2 random couplings");

  HarmExtremes ext = extreme_harm_couplings(m);
  std::vector<Coupling> sample;
  sample.reserve(n + 2);
  sample.push_back(std::move(ext.min_harm));
  sample.push_back(std::move(ext.max_harm));
  for (Coupling& pi : random_couplings(m, n, seed)) sample.push_back(std::move(pi));

  double spread = 0.0;
  for (int d = 0; d < 2; ++d) {
    double lo = expected_utility(u, d, sample.front());
    double hi = lo;
    for (const Coupling& pi : sample) {
      double eu = expected_utility(u, d, pi);
      lo = std::min(lo, eu);
      hi = std::max(hi, eu);
    }
    spread = std::max(spread, hi - lo);
  }
  return SufficiencyReport{spread, spread <= 1e-9};
}

Dominance fosd(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("distributions must share the outcome space");
  const double tol = kProbTol;
  bool below = false, above = false;  // CDF of p vs CDF of q
  double cp = 0.0, cq = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {  // last cumulative is 1 on both sides
    cp += p[k];
    cq += q[k];
    if (cp < cq - tol) below = true;
    if (cp > cq + tol) above = true;
  }
  if (!below && !above) return Dominance::Equal;
  if (!above) return Dominance::Dominates;  // lower CDF everywhere: more mass on better outcomes
  if (!below) return Dominance::Dominated;
  return Dominance::Incomparable;
}

std::optional<DominanceViolation> dominance_audit(const DecisionProblem& pb,
                                                  const Criterion& criterion) {
  DecisionReport rep = decide(pb, criterion);
  if (rep.tie) return std::nullopt;
  Dominance rel = fosd(pb.marginals().p1, pb.marginals().p0);
  if (rel == Dominance::Dominates && rep.chosen == pb.arms().label0) {
    // Arm 1 dominates but arm 0 was picked: blame arm 1's witness coupling.
    return DominanceViolation{rep.chosen, pb.arms().label1,
                              rep.witness1 ? *rep.witness1 : *rep.witness0};
  }
  if (rel == Dominance::Dominated && rep.chosen == pb.arms().label1) {
    return DominanceViolation{rep.chosen, pb.arms().label0,
                              rep.witness0 ? *rep.witness0 : *rep.witness1};
  }
  return std::nullopt;
}

StatusQuoReport status_quo_audit(const DecisionProblem& pb, const Criterion& criterion) {
  if (!pb.hippocratic())
    throw std::invalid_argument("status-quo audit needs the generating hippocratic spec");

  ArmPair swapped_arms{pb.arms().label1, pb.arms().label0};
  Marginals swapped_marginals{pb.marginals().p1, pb.marginals().p0};
  std::optional<Coupling> swapped_coupling;
  if (pb.coupling()) swapped_coupling = pb.coupling()->transposed();
  DecisionProblem relabeled = DecisionProblem::from_hippocratic(
      std::move(swapped_arms), pb.space(), std::move(swapped_marginals), *pb.hippocratic(),
      std::move(swapped_coupling));

  Criterion relabeled_criterion = criterion;
  if (relabeled_criterion.coupling)
    relabeled_criterion.coupling = relabeled_criterion.coupling->transposed();

  DecisionReport original = decide(pb, criterion);
  DecisionReport flipped = decide(relabeled, relabeled_criterion);

  StatusQuoReport out;
  out.original_choice = original.chosen;
  out.relabeled_choice = flipped.chosen;
  out.indeterminate = original.tie || flipped.tie;
  out.biased = !out.indeterminate && original.chosen != flipped.chosen;
  return out;
}

void EffectiveLambdaSpec::validate() const {
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must lie in [0, 1]");
}

double effective_lambda(const EffectiveLambdaSpec& spec) {
  spec.validate();
  return 1.0 + (1.0 - spec.q) * (spec.lambda - 1.0);
}

double legal_lambda(double proportionality, double p_lawsuit) {
  if (!std::isfinite(proportionality) || proportionality < 0.0)
    throw std::invalid_argument("proportionality constant must be finite and >= 0");
  if (!(p_lawsuit >= 0.0 && p_lawsuit <= 1.0))
    throw std::invalid_argument("lawsuit probability must lie in [0, 1]");
  return proportionality * p_lawsuit;
}

}  // namespace strata
