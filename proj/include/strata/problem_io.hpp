#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "strata/criteria.hpp"

namespace strata {

// Malformed problem file: unreadable, bad JSON, wrong shape, or both a
// utility table and a hippocratic weight at once.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally fine but semantically invalid: bad marginals, non-finite
// utilities, inconsistent coupling.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Optional scenario metadata carried by a problem file: self-medication
// probability under d = 0 and the liability parameters.
struct Scenario {
  std::optional<double> q;
  std::optional<double> legal_constant;
  std::optional<double> lawsuit_probability;
};

struct LoadedProblem {
  DecisionProblem problem;
  Scenario scenario;
};

// JSON problem schema:
//   {
//     "arms": ["compound A", "compound B"],
//     "outcomes": {"labels": ["death", "survival"], "values": [0, 1]},
//     "marginals": {"p0": [0.9, 0.1], "p1": [0.8, 0.2]},
//     "utility": {"hippocratic": 2.0}            (or {"table": [u0, u1]}),
//     "coupling": [[0.72, 0.18], [0.08, 0.02]],  (optional)
//     "scenario": {"q": 0.9}                     (optional)
//   }
// Exactly one of "table"/"hippocratic" must be present.
LoadedProblem parse_problem(const std::string& path);
LoadedProblem parse_problem_text(const std::string& text, const std::string& origin = "<string>");

// The four built-in example problems over the 10% vs 20% survival marginals:
//   1  compound A (default)         vs compound B
//   2  do not treat                 vs compound B
//   3  compound B (default)         vs compound A, marginals exchanged
//   4  do not treat + self-medication with A (scenario q) vs compound B
LoadedProblem builtin_problem(int id, double lambda);

}  // namespace strata
