#include "strata/criteria.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace strata {

DecisionProblem::DecisionProblem(ArmPair arms, OutcomeSpace space, Marginals marginals,
                                 UtilityTable utility, std::optional<HippocraticSpec> hippocratic,
                                 std::optional<Coupling> coupling)
    : arms_(std::move(arms)),
      space_(std::move(space)),
      marginals_(std::move(marginals)),
      utility_(std::move(utility)),
      hippocratic_(hippocratic),
      coupling_(std::move(coupling)) {
  arms_.validate();
  space_.validate();
  require_valid(marginals_);
  if (marginals_.size() != space_.size())
    throw std::invalid_argument("marginals length must match the outcome space");
  if (utility_.outcomes() != space_.size())
    throw std::invalid_argument("utility table size must match the outcome space");
  if (hippocratic_) hippocratic_->validate();
  if (coupling_ && !coupling_->consistent_with(marginals_))
    throw std::invalid_argument("fixed coupling is inconsistent with the marginals");
}

DecisionProblem DecisionProblem::from_hippocratic(ArmPair arms, OutcomeSpace space,
                                                  Marginals marginals, HippocraticSpec spec,
                                                  std::optional<Coupling> coupling) {
  UtilityTable u = make_hippocratic(spec, space);
  return DecisionProblem(std::move(arms), std::move(space), std::move(marginals), std::move(u),
                         spec, std::move(coupling));
}

DecisionProblem DecisionProblem::with_lambda(double lambda) const {
  if (!hippocratic_)
    throw std::invalid_argument("cannot reweight a problem with an explicit utility table");
  return from_hippocratic(arms_, space_, marginals_, HippocraticSpec{lambda}, coupling_);
}

std::string Criterion::name() const {
  switch (kind) {
    case Kind::Bayes: return "bayes";
    case Kind::Maxmin: return "maxmin";
    case Kind::Maxmax: return "maxmax";
    case Kind::MinimaxRegret: return "minimax-regret";
    case Kind::Independence: return "independence";
    case Kind::Monotone: return "monotone";
  }
  return "?";
}

std::optional<Criterion::Kind> Criterion::kind_from_name(const std::string& name) {
  if (name == "bayes") return Kind::Bayes;
  if (name == "maxmin") return Kind::Maxmin;
  if (name == "maxmax") return Kind::Maxmax;
  if (name == "minimax-regret") return Kind::MinimaxRegret;
  if (name == "independence") return Kind::Independence;
  if (name == "monotone") return Kind::Monotone;
  return std::nullopt;
}

namespace {

// Regret of action d with its adversarial coupling.
std::pair<double, Coupling> regret_with_witness(const DecisionProblem& pb, int d) {
  const UtilityTable& u = pb.utility();
  Matrix shortfall = u.for_arm(1 - d) - u.for_arm(d);
  TransportResult worst = max_expectation(shortfall, pb.marginals());
  return {std::max(0.0, worst.value), std::move(worst.coupling)};
}

DecisionReport evaluate_at(const DecisionProblem& pb, const Coupling& pi) {
  if (!pi.consistent_with(pb.marginals()))
    throw std::invalid_argument("supplied coupling is inconsistent with the marginals");
  DecisionReport rep;
  rep.value0 = expected_utility(pb.utility(), 0, pi);
  rep.value1 = expected_utility(pb.utility(), 1, pi);
  rep.witness0 = pi;
  rep.witness1 = pi;
  return rep;
}

}  // namespace

DecisionReport decide(const DecisionProblem& pb, const Criterion& criterion) {
  DecisionReport rep;
  bool lower_is_better = false;

  switch (criterion.kind) {
    case Criterion::Kind::Bayes: {
      const std::optional<Coupling>& pi =
          criterion.coupling ? criterion.coupling : pb.coupling();
      if (!pi)
        throw std::invalid_argument("bayes criterion needs a coupling (none supplied or fixed)");
      rep = evaluate_at(pb, *pi);
      break;
    }
    case Criterion::Kind::Maxmin: {
      TransportResult r0 = min_expectation(pb.utility().for_arm(0), pb.marginals());
      TransportResult r1 = min_expectation(pb.utility().for_arm(1), pb.marginals());
      rep.value0 = r0.value;
      rep.value1 = r1.value;
      rep.witness0 = std::move(r0.coupling);
      rep.witness1 = std::move(r1.coupling);
      break;
    }
    case Criterion::Kind::Maxmax: {
      TransportResult r0 = max_expectation(pb.utility().for_arm(0), pb.marginals());
      TransportResult r1 = max_expectation(pb.utility().for_arm(1), pb.marginals());
      rep.value0 = r0.value;
      rep.value1 = r1.value;
      rep.witness0 = std::move(r0.coupling);
      rep.witness1 = std::move(r1.coupling);
      break;
    }
    case Criterion::Kind::MinimaxRegret: {
      auto [reg0, w0] = regret_with_witness(pb, 0);
      auto [reg1, w1] = regret_with_witness(pb, 1);
      rep.value0 = reg0;
      rep.value1 = reg1;
      rep.witness0 = std::move(w0);
      rep.witness1 = std::move(w1);
      lower_is_better = true;
      break;
    }
    case Criterion::Kind::Independence:
      rep = evaluate_at(pb, product_coupling(pb.marginals()));
      break;
    case Criterion::Kind::Monotone:
      rep = evaluate_at(pb, extreme_harm_couplings(pb.marginals()).min_harm);
      break;
  }

  rep.lambda_used =
      pb.hippocratic() ? std::optional<double>(pb.hippocratic()->lambda) : std::nullopt;
  double gap = rep.value1 - rep.value0;
  if (std::fabs(gap) <= kTieTol) {
    rep.tie = true;
    rep.chosen = pb.arms().label0;
  } else {
    bool arm1_wins = lower_is_better ? gap < 0.0 : gap > 0.0;
    rep.chosen = arm1_wins ? pb.arms().label1 : pb.arms().label0;
  }
  return rep;
}

double regret_of_action(const DecisionProblem& pb, int d) {
  if (d != 0 && d != 1) throw std::invalid_argument("arm index must be 0 or 1");
  return regret_with_witness(pb, d).first;
}

std::optional<double> lambda_threshold(const Marginals& m, const Criterion& criterion) {
  require_valid(m);
  if (m.size() != 2)
    throw std::invalid_argument("lambda_threshold requires a binary outcome space");
  if (criterion.kind == Criterion::Kind::Bayes && !criterion.coupling)
    throw std::invalid_argument("lambda_threshold under bayes needs an explicit coupling");

  ArmPair arms{"arm 0", "arm 1"};
  auto chooses_new = [&](double lambda) {
    DecisionProblem pb = DecisionProblem::from_hippocratic(arms, OutcomeSpace::binary(), m,
                                                           HippocraticSpec{lambda});
    DecisionReport rep = decide(pb, criterion);
    return !rep.tie && rep.chosen == arms.label1;
  };

  // Decisions in this family are monotone in lambda, so the flip point is
  // the single sign change over the bracket.
  double lo = 1.0;
  double hi = 1e6;
  if (!chooses_new(lo)) return lo;
  if (chooses_new(hi)) return std::nullopt;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    double mid = 0.5 * (lo + hi);
    (chooses_new(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace strata
