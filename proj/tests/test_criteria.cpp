#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "strata/criteria.hpp"

using namespace strata;

namespace {

const Marginals& kPaper = oracle::kPaperMarginals;

DecisionProblem paper_problem(double lambda, std::optional<Coupling> coupling = std::nullopt) {
  return DecisionProblem::from_hippocratic({"compound A", "compound B"}, OutcomeSpace::binary(),
                                           kPaper, HippocraticSpec{lambda}, std::move(coupling));
}

// Grid-search decision oracle over the harm cell, mirroring the tie rule.
bool grid_chooses_new(const Marginals& m, double lambda, Criterion::Kind kind) {
  double v0 = 0.0, v1 = 0.0;
  switch (kind) {
    case Criterion::Kind::Maxmin:
      v1 = oracle::grid_min_eu_diff(m, lambda).value;
      break;
    case Criterion::Kind::Maxmax:
      v1 = oracle::grid_max_eu_diff(m, lambda).value;
      break;
    case Criterion::Kind::Independence:
      v1 = oracle::hippocratic_eu_diff(m, lambda, m.p0[1] * (1.0 - m.p1[1]));
      break;
    case Criterion::Kind::Monotone:
      v1 = oracle::hippocratic_eu_diff(m, lambda, oracle::binary_h_min(m));
      break;
    case Criterion::Kind::MinimaxRegret: {
      v0 = std::max(0.0, oracle::grid_max_eu_diff(m, lambda).value);   // regret of arm 0
      v1 = std::max(0.0, -oracle::grid_min_eu_diff(m, lambda).value);  // regret of arm 1
      return v1 < v0 - kTieTol;
    }
    case Criterion::Kind::Bayes:
      break;
  }
  return v1 > v0 + kTieTol;
}

}  // namespace

TEST_CASE("decision problem validation") {
  CHECK_NOTHROW(paper_problem(2.0));
  CHECK_THROWS_AS(DecisionProblem::from_hippocratic({"a", "b"}, OutcomeSpace::binary(),
                                                    Marginals{{0.9, 0.1}, {0.7, 0.2}},
                                                    HippocraticSpec{2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DecisionProblem::from_hippocratic(
                      {"a", "b"}, OutcomeSpace{{"x", "y", "z"}, {0, 1, 2}}, kPaper,
                      HippocraticSpec{2.0}),
                  std::invalid_argument);
  // Fixed coupling must match the marginals.
  CHECK_THROWS_AS(paper_problem(2.0, Coupling(Matrix::from_rows({{0.5, 0.0}, {0.0, 0.5}}))),
                  std::invalid_argument);

  OutcomeSpace space = OutcomeSpace::binary();
  DecisionProblem explicit_table({"a", "b"}, space, kPaper,
                                 make_hippocratic(HippocraticSpec{2.0}, space));
  CHECK_FALSE(explicit_table.hippocratic().has_value());
  CHECK_THROWS_AS(explicit_table.with_lambda(3.0), std::invalid_argument);
  CHECK(paper_problem(2.0).with_lambda(3.0).hippocratic()->lambda == 3.0);
}

TEST_CASE("criterion names round-trip") {
  for (auto kind : {Criterion::Kind::Bayes, Criterion::Kind::Maxmin, Criterion::Kind::Maxmax,
                    Criterion::Kind::MinimaxRegret, Criterion::Kind::Independence,
                    Criterion::Kind::Monotone}) {
    Criterion c{kind, std::nullopt};
    auto parsed = Criterion::kind_from_name(c.name());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(Criterion::kind_from_name("median").has_value());
}

TEST_CASE("maxmin decisions on the running example") {
  DecisionReport mild = decide(paper_problem(1.5), Criterion::maxmin());
  CHECK(mild.chosen == "compound B");
  CHECK(mild.value0 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(mild.value1 == doctest::Approx(0.05).epsilon(1e-9));
  CHECK_FALSE(mild.tie);
  CHECK(mild.lambda_used == 1.5);
  REQUIRE(mild.witness1.has_value());
  CHECK((*mild.witness1)(1, 0) == doctest::Approx(0.10).epsilon(1e-9));

  DecisionReport averse = decide(paper_problem(3.0), Criterion::maxmin());
  CHECK(averse.chosen == "compound A");
  CHECK(averse.value1 == doctest::Approx(-0.10).epsilon(1e-9));
}

TEST_CASE("monotone criterion keeps the treatment arm at any weight") {
  DecisionReport rep = decide(paper_problem(100.0), Criterion::monotone());
  CHECK(rep.chosen == "compound B");
  CHECK(rep.value1 == doctest::Approx(0.10).epsilon(1e-9));
  REQUIRE(rep.witness1.has_value());
  CHECK((*rep.witness1)(1, 0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("independence and maxmax on the running example") {
  DecisionReport indep = decide(paper_problem(2.0), Criterion::independence());
  CHECK(indep.chosen == "compound B");
  CHECK(indep.value1 == doctest::Approx(0.02).epsilon(1e-9));

  DecisionReport indep_past_threshold = decide(paper_problem(2.5), Criterion::independence());
  CHECK(indep_past_threshold.chosen == "compound A");

  DecisionReport optimist = decide(paper_problem(50.0), Criterion::maxmax());
  CHECK(optimist.chosen == "compound B");
  CHECK(optimist.value1 == doctest::Approx(0.10).epsilon(1e-9));
}

TEST_CASE("bayes needs a consistent coupling") {
  Coupling pi = product_coupling(kPaper);
  DecisionReport rep = decide(paper_problem(2.0), Criterion::bayes(pi));
  CHECK(rep.chosen == "compound B");
  CHECK(rep.value1 == doctest::Approx(0.02).epsilon(1e-12));

  // Falls back to the problem's fixed coupling.
  DecisionReport fixed = decide(paper_problem(2.0, pi), Criterion{Criterion::Kind::Bayes});
  CHECK(fixed.value1 == doctest::Approx(0.02).epsilon(1e-12));

  CHECK_THROWS_AS(decide(paper_problem(2.0), Criterion{Criterion::Kind::Bayes}),
                  std::invalid_argument);
  Coupling wrong = product_coupling(Marginals{{0.5, 0.5}, {0.5, 0.5}});
  CHECK_THROWS_AS(decide(paper_problem(2.0), Criterion::bayes(wrong)), std::invalid_argument);
}

TEST_CASE("ties pick label0 and are flagged") {
  DecisionProblem pb = DecisionProblem::from_hippocratic(
      {"old", "new"}, OutcomeSpace::binary(), Marginals{{0.8, 0.2}, {0.8, 0.2}},
      HippocraticSpec{1.0});
  for (auto c : {Criterion::maxmin(), Criterion::independence(), Criterion::monotone()}) {
    DecisionReport rep = decide(pb, c);
    CHECK(rep.tie);
    CHECK(rep.chosen == "old");
    CHECK(std::fabs(rep.value1 - rep.value0) <= kTieTol);
  }
}

TEST_CASE("regret of each action") {
  DecisionProblem pb2 = paper_problem(2.0);
  CHECK(regret_of_action(pb2, 0) == doctest::Approx(0.10).epsilon(1e-9));
  CHECK(regret_of_action(pb2, 1) == doctest::Approx(0.0).epsilon(1e-9));

  DecisionProblem pb4 = paper_problem(4.0);
  CHECK(regret_of_action(pb4, 1) == doctest::Approx(0.20).epsilon(1e-9));
  CHECK_THROWS_AS(regret_of_action(pb2, 2), std::invalid_argument);

  DecisionReport keep = decide(pb2, Criterion::minimax_regret());
  CHECK(keep.chosen == "compound B");
  DecisionReport averse = decide(pb4, Criterion::minimax_regret());
  CHECK(averse.chosen == "compound A");
  DecisionReport knife_edge = decide(paper_problem(3.0), Criterion::minimax_regret());
  CHECK(knife_edge.tie);
  CHECK(knife_edge.chosen == "compound A");
}

TEST_CASE("lambda thresholds on the running example") {
  auto maxmin = lambda_threshold(kPaper, Criterion::maxmin());
  REQUIRE(maxmin.has_value());
  CHECK(std::fabs(*maxmin - 2.0) < 1e-6);

  auto indep = lambda_threshold(kPaper, Criterion::independence());
  REQUIRE(indep.has_value());
  CHECK(std::fabs(*indep - 2.25) < 1e-6);

  auto regret = lambda_threshold(kPaper, Criterion::minimax_regret());
  REQUIRE(regret.has_value());
  CHECK(std::fabs(*regret - 3.0) < 1e-6);

  CHECK_FALSE(lambda_threshold(kPaper, Criterion::monotone()).has_value());
  CHECK_FALSE(lambda_threshold(kPaper, Criterion::maxmax()).has_value());

  // Bayes at the product measure must agree with the independence rule.
  auto bayes = lambda_threshold(kPaper, Criterion::bayes(product_coupling(kPaper)));
  REQUIRE(bayes.has_value());
  CHECK(std::fabs(*bayes - 2.25) < 1e-6);
  CHECK_THROWS_AS(lambda_threshold(kPaper, Criterion{Criterion::Kind::Bayes}),
                  std::invalid_argument);

  Marginals ternary{{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}};
  CHECK_THROWS_AS(lambda_threshold(ternary, Criterion::maxmin()), std::invalid_argument);

  // Already past the flip at lambda = 1: threshold collapses to the bracket edge.
  Marginals reversed{{0.8, 0.2}, {0.9, 0.1}};
  auto collapsed = lambda_threshold(reversed, Criterion::maxmin());
  REQUIRE(collapsed.has_value());
  CHECK(*collapsed == 1.0);
}

TEST_CASE("thresholds agree with the lambda-grid oracle") {
  for (auto kind : {Criterion::Kind::Maxmin, Criterion::Kind::Independence,
                    Criterion::Kind::MinimaxRegret}) {
    auto threshold = lambda_threshold(kPaper, Criterion{kind});
    REQUIRE(threshold.has_value());
    // Locate the flip on a step-1e-3 grid; bisection must land in the bracket.
    double flip_lo = 1.0, flip_hi = std::numeric_limits<double>::quiet_NaN();
    for (double lambda = 1.0; lambda <= 4.0; lambda += 1e-3) {
      if (grid_chooses_new(kPaper, lambda, kind)) {
        flip_lo = lambda;
      } else {
        flip_hi = lambda;
        break;
      }
    }
    REQUIRE(std::isfinite(flip_hi));
    CHECK(*threshold >= flip_lo - 1e-6);
    CHECK(*threshold <= flip_hi + 1e-6);
  }
}

TEST_CASE("decisions are threshold rules in lambda") {
  for (auto kind : {Criterion::Kind::Maxmin, Criterion::Kind::Maxmax,
                    Criterion::Kind::MinimaxRegret, Criterion::Kind::Independence,
                    Criterion::Kind::Monotone}) {
    bool seen_old = false;
    int switches = 0;
    bool prev = true;
    for (double lambda = 1.0; lambda <= 6.0 + 1e-12; lambda += 0.01) {
      DecisionReport rep = decide(paper_problem(lambda), Criterion{kind});
      bool chooses_new = !rep.tie && rep.chosen == "compound B";
      if (chooses_new && seen_old)
        FAIL("choice returned to the treatment arm at lambda " << lambda << " under "
                                                               << Criterion{kind}.name());
      if (!chooses_new) seen_old = true;
      if (chooses_new != prev) ++switches;
      prev = chooses_new;
    }
    CHECK(switches <= 1);
  }
}

TEST_CASE("worst case flips before any bayes coupling, best case last") {
  auto to_inf = [](const std::optional<double>& v) {
    return v ? *v : std::numeric_limits<double>::infinity();
  };
  double lo = to_inf(lambda_threshold(kPaper, Criterion::maxmin()));
  double hi = to_inf(lambda_threshold(kPaper, Criterion::maxmax()));
  for (const Coupling& pi : vertices(kPaper)) {
    double mid = to_inf(lambda_threshold(kPaper, Criterion::bayes(pi)));
    CHECK(lo <= mid + 1e-9);
    CHECK(mid <= hi + 1e-9);
  }
  for (const Coupling& pi : random_couplings(kPaper, 25, 42)) {
    double mid = to_inf(lambda_threshold(kPaper, Criterion::bayes(pi)));
    CHECK(lo <= mid + 1e-9);
    CHECK(mid <= hi + 1e-9);
  }
}

TEST_CASE("bayes under an additive table ignores the coupling") {
  DecisionProblem pb = paper_problem(1.0);
  for (const Coupling& pi : random_couplings(kPaper, 100, 42)) {
    DecisionReport rep = decide(pb, Criterion::bayes(pi));
    CHECK(rep.chosen == "compound B");
    CHECK(std::fabs((rep.value1 - rep.value0) - 0.10) < 1e-12);
  }
}
