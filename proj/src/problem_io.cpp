#include "strata/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace strata {

namespace {

using nlohmann::json;

std::vector<double> number_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(field + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Matrix number_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field + " must be a nonempty array of rows");
  std::size_t cols = 0;
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    rows.push_back(number_vector(r, field));
    if (cols == 0) cols = rows.back().size();
    if (rows.back().size() != cols) throw ParseError(field + " rows must have equal length");
  }
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j2 = 0; j2 < cols; ++j2) m(i, j2) = rows[i][j2];
  return m;
}

const json& required(const json& j, const std::string& field) {
  auto it = j.find(field);
  if (it == j.end()) throw ParseError("missing required field \"" + field + "\"");
  return *it;
}

LoadedProblem from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("problem file must be a JSON object");

  const json& jarms = required(doc, "arms");
  if (!jarms.is_array() || jarms.size() != 2 || !jarms[0].is_string() || !jarms[1].is_string())
    throw ParseError("\"arms\" must be an array of two labels");
  ArmPair arms{jarms[0].get<std::string>(), jarms[1].get<std::string>()};

  const json& jout = required(doc, "outcomes");
  OutcomeSpace space;
  const json& jlabels = required(jout, "labels");
  if (!jlabels.is_array()) throw ParseError("\"outcomes.labels\" must be an array of strings");
  for (const auto& l : jlabels) {
    if (!l.is_string()) throw ParseError("\"outcomes.labels\" must be an array of strings");
    space.labels.push_back(l.get<std::string>());
  }
  space.values = number_vector(required(jout, "values"), "outcomes.values");

  const json& jm = required(doc, "marginals");
  Marginals marginals{number_vector(required(jm, "p0"), "marginals.p0"),
                      number_vector(required(jm, "p1"), "marginals.p1")};

  const json& ju = required(doc, "utility");
  bool has_table = ju.contains("table");
  bool has_hippocratic = ju.contains("hippocratic");
  if (has_table == has_hippocratic)
    throw ParseError("\"utility\" must carry exactly one of \"table\" or \"hippocratic\"");

  std::optional<Coupling> coupling;
  if (doc.contains("coupling")) {
    try {
      coupling = Coupling(number_matrix(doc["coupling"], "coupling"));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }

  Scenario scenario;
  if (doc.contains("scenario")) {
    const json& js = doc["scenario"];
    if (!js.is_object()) throw ParseError("\"scenario\" must be an object");
    if (js.contains("q")) scenario.q = js["q"].get<double>();
    if (js.contains("legal_constant")) scenario.legal_constant = js["legal_constant"].get<double>();
    if (js.contains("lawsuit_probability"))
      scenario.lawsuit_probability = js["lawsuit_probability"].get<double>();
  }

  try {
    if (has_hippocratic) {
      if (!ju["hippocratic"].is_number())
        throw ParseError("\"utility.hippocratic\" must be a number");
      HippocraticSpec spec{ju["hippocratic"].get<double>()};
      return LoadedProblem{DecisionProblem::from_hippocratic(std::move(arms), std::move(space),
                                                             std::move(marginals), spec,
                                                             std::move(coupling)),
                           scenario};
    }
    const json& jt = ju["table"];
    if (!jt.is_array() || jt.size() != 2)
      throw ParseError("\"utility.table\" must hold two matrices, one per arm");
    UtilityTable table(number_matrix(jt[0], "utility.table[0]"),
                       number_matrix(jt[1], "utility.table[1]"));
    return LoadedProblem{DecisionProblem(std::move(arms), std::move(space), std::move(marginals),
                                         std::move(table), std::nullopt, std::move(coupling)),
                         scenario};
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace

LoadedProblem parse_problem_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

LoadedProblem parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_text(buf.str(), path);
}

LoadedProblem builtin_problem(int id, double lambda) {
  Marginals standard{{0.9, 0.1}, {0.8, 0.2}};
  Marginals exchanged{{0.8, 0.2}, {0.9, 0.1}};
  HippocraticSpec spec{lambda};
  OutcomeSpace space = OutcomeSpace::binary();
  switch (id) {
    case 1:
      return LoadedProblem{DecisionProblem::from_hippocratic({"compound A", "compound B"}, space,
                                                             standard, spec),
                           {}};
    case 2:
      return LoadedProblem{DecisionProblem::from_hippocratic({"do not treat", "compound B"}, space,
                                                             standard, spec),
                           {}};
    case 3:
      return LoadedProblem{DecisionProblem::from_hippocratic({"compound B", "compound A"}, space,
                                                             exchanged, spec),
                           {}};
    case 4: {
      Scenario scenario;
      scenario.q = 0.9;  // patient self-medicates with the over-the-counter compound
      return LoadedProblem{DecisionProblem::from_hippocratic({"do not treat", "compound B"}, space,
                                                             standard, spec),
                           scenario};
    }
    default:
      throw ParseError("unknown built-in problem id (expected 1..4)");
  }
}

}  // namespace strata
