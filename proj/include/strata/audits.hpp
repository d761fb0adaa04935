#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "strata/criteria.hpp"

namespace strata {

// Witness quadruple for a failed additivity check: the second difference
// u(d,a,b) + u(d,a2,b2) - u(d,a,b2) - u(d,a2,b) that does not vanish.
struct AdditivityWitness {
  int d = 0;
  std::size_t a = 0, a2 = 0, b = 0, b2 = 0;
  double second_difference = 0.0;
};

struct AdditivityReport {
  bool additive = true;
  std::optional<AdditivityWitness> witness;
};

// A table is additive iff it decomposes as g(d,y0) + h(d,y1), which holds
// iff every second difference vanishes. Exactly the additive tables have
// coupling-independent expected utility.
AdditivityReport additivity_check(const UtilityTable& u, double tol = 1e-9);

struct SufficiencyReport {
  double spread = 0.0;    // max over d of (max - min) EU across the sample
  bool invariant = true;  // spread <= 1e-9
};

// Empirical counterpart of the additivity characterization: evaluates EU at
// the two extreme-harm couplings plus n random feasible couplings and
// reports the spread. n >= 2.
SufficiencyReport marginal_sufficiency_check(const UtilityTable& u, const Marginals& m,
                                             std::size_t n, std::uint64_t seed = kDefaultSeed);

// First-order stochastic dominance of p over q by cumulative comparison at
// every threshold (outcomes ordered worst to best).
enum class Dominance { Dominates, Dominated, Equal, Incomparable };
Dominance fosd(const std::vector<double>& p, const std::vector<double>& q);

struct DominanceViolation {
  std::string chosen;    // the dominated arm that was selected
  std::string dominant;  // the arm whose marginal strictly dominates
  Coupling witness;      // extremal coupling driving the choice
};

// Fires when one arm's marginal strictly dominates the other's yet the
// criterion picks the dominated arm. Ties never count as violations.
std::optional<DominanceViolation> dominance_audit(const DecisionProblem& problem,
                                                  const Criterion& criterion);

struct StatusQuoReport {
  std::string original_choice;
  std::string relabeled_choice;
  bool biased = false;         // chosen compound changed with the labeling
  bool indeterminate = false;  // a tie in either labeling; biased is then moot
};

// Swaps which compound plays d = 0: marginals exchanged and the hippocratic
// table rebuilt so the harm penalty attaches to the new d = 1 (rebuilding,
// not transposing, is what makes the asymmetry follow the action role).
// Requires the generating spec on the problem.
StatusQuoReport status_quo_audit(const DecisionProblem& problem, const Criterion& criterion);

// Self-medication under d = 0 waters the asymmetry down: lambda_eff
// interpolates from lambda at q = 0 to 1 at q = 1.
struct EffectiveLambdaSpec {
  double lambda = 1.0;
  double q = 0.0;  // probability of self-medication under d = 0
  void validate() const;
};
double effective_lambda(const EffectiveLambdaSpec& spec);

// Liability-driven asymmetry: proportional to the lawsuit probability and,
// unlike the ethical reading, indifferent to what the patient would do
// untreated.
double legal_lambda(double proportionality, double p_lawsuit);

}  // namespace strata
