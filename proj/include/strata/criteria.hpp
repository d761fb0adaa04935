#pragma once

#include <optional>
#include <string>

#include "strata/frechet.hpp"

namespace strata {

// Two decision values within this band are treated as a tie. Ties are
// surfaced explicitly, never silently resolved, because a hidden default
// would itself be a status-quo bias.
inline constexpr double kTieTol = 1e-9;

// A complete two-arm decision problem: the identified marginals plus the
// utility over potential-outcome pairs. When the utility was generated from
// a HippocraticSpec the spec travels along, so audits can rebuild the table
// under relabeling.
class DecisionProblem {
 public:
  DecisionProblem(ArmPair arms, OutcomeSpace space, Marginals marginals, UtilityTable utility,
                  std::optional<HippocraticSpec> hippocratic = std::nullopt,
                  std::optional<Coupling> coupling = std::nullopt);

  static DecisionProblem from_hippocratic(ArmPair arms, OutcomeSpace space, Marginals marginals,
                                          HippocraticSpec spec,
                                          std::optional<Coupling> coupling = std::nullopt);

  const ArmPair& arms() const { return arms_; }
  const OutcomeSpace& space() const { return space_; }
  const Marginals& marginals() const { return marginals_; }
  const UtilityTable& utility() const { return utility_; }
  const std::optional<HippocraticSpec>& hippocratic() const { return hippocratic_; }
  const std::optional<Coupling>& coupling() const { return coupling_; }

  // Same problem with a fresh hippocratic weight.
  DecisionProblem with_lambda(double lambda) const;

 private:
  ArmPair arms_;
  OutcomeSpace space_;
  Marginals marginals_;
  UtilityTable utility_;
  std::optional<HippocraticSpec> hippocratic_;
  std::optional<Coupling> coupling_;
};

// How to resolve the free coupling: trust one (Bayes/Independence/Monotone)
// or rank arms by worst case, best case, or worst-case regret.
struct Criterion {
  enum class Kind { Bayes, Maxmin, Maxmax, MinimaxRegret, Independence, Monotone };

  Kind kind = Kind::Maxmin;
  std::optional<Coupling> coupling;  // Bayes only

  static Criterion bayes(Coupling pi) { return Criterion{Kind::Bayes, std::move(pi)}; }
  static Criterion maxmin() { return Criterion{Kind::Maxmin, std::nullopt}; }
  static Criterion maxmax() { return Criterion{Kind::Maxmax, std::nullopt}; }
  static Criterion minimax_regret() { return Criterion{Kind::MinimaxRegret, std::nullopt}; }
  static Criterion independence() { return Criterion{Kind::Independence, std::nullopt}; }
  static Criterion monotone() { return Criterion{Kind::Monotone, std::nullopt}; }

  std::string name() const;
  static std::optional<Criterion::Kind> kind_from_name(const std::string& name);
};

struct DecisionReport {
  std::string chosen;  // arm label; label0 on ties
  double value0 = 0.0;
  double value1 = 0.0;
  // Coupling at which each arm's criterion value is attained (extremal for
  // the worst/best-case rules, the evaluation coupling otherwise).
  std::optional<Coupling> witness0;
  std::optional<Coupling> witness1;
  bool tie = false;
  std::optional<double> lambda_used;
};

// Rank the two arms under the criterion. For MinimaxRegret the values are
// regrets and the smaller one wins; for every other criterion the values
// are expected utilities and the larger one wins. Ties pick label0 with
// tie = true.
DecisionReport decide(const DecisionProblem& problem, const Criterion& criterion);

// Worst-case shortfall of action d against the other action over the whole
// identified set, floored at zero. One exact linear optimization.
double regret_of_action(const DecisionProblem& problem, int d);

// The hippocratic weight at which the criterion's choice flips from arm 1
// to arm 0, for a binary outcome space. Bisection on [1, 1e6] to 1e-9;
// nullopt when arm 1 is chosen over the whole bracket (no flip). Returns
// 1.0 when arm 1 is not chosen even at lambda = 1.
std::optional<double> lambda_threshold(const Marginals& m, const Criterion& criterion);

}  // namespace strata
