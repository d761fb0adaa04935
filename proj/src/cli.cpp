#include "strata/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "strata/audits.hpp"
#include "strata/problem_io.hpp"

namespace strata::cli {

namespace {

// Fixed 9-significant-digit decimal rendering keeps CSV output stable enough
// for byte-identical golden files.
std::string fmt9(double v) {
  if (v == 0.0) v = 0.0;  // collapse -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string matrix_str(const Matrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i == 0 ? "[" : ", [";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) s += ", ";
      s += fmt9(m(i, j));
    }
    s += "]";
  }
  return s + "]";
}

struct Opts {
  std::string path;
  int example_id = 0;
  std::string criterion = "maxmin";
  bool lambda_set = false;
  double lambda = 2.0;
  double lambda_from = 1.0;
  double lambda_to = 4.0;
  double step = 0.05;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;
  std::size_t n_samples = 100;
  bool strict = false;
  std::string format = "table";
  std::string out_path;
  bool q_set = false;
  double q = 0.9;
};

LoadedProblem load_problem(const Opts& opts) {
  if (opts.example_id == 0 && opts.path.empty())
    throw ValidationError("no problem given: pass --problem FILE or --example N");
  LoadedProblem lp = opts.example_id != 0 ? builtin_problem(opts.example_id, opts.lambda)
                                          : parse_problem(opts.path);
  if (opts.example_id == 0 && opts.lambda_set) lp.problem = lp.problem.with_lambda(opts.lambda);
  if (opts.q_set) lp.scenario.q = opts.q;
  return lp;
}

Criterion make_criterion(const Opts& opts) {
  auto kind = Criterion::kind_from_name(opts.criterion);
  if (!kind) throw ValidationError("unknown criterion: " + opts.criterion);
  // bayes picks up the problem's fixed coupling inside decide()
  return Criterion{*kind, std::nullopt};
}

int deliver(const std::string& text, const Opts& opts, std::ostream& out, std::ostream& err) {
  if (opts.out_path.empty()) {
    out << text;
    return 0;
  }
  std::ofstream f(opts.out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << opts.out_path << "\n";
    return 2;
  }
  f << text;
  return 0;
}

void print_kv(std::ostream& out, const std::string& key, const std::string& value,
              int width = 18) {
  out << std::left << std::setw(width) << key << value << "\n";
}

void print_report(std::ostream& out, const DecisionProblem& pb, const Criterion& c,
                  const DecisionReport& rep) {
  print_kv(out, "criterion", c.name());
  if (rep.lambda_used) {
    HippocraticSpec spec{*rep.lambda_used};
    print_kv(out, "lambda",
             fmt9(*rep.lambda_used) + (spec.hippocratic() ? " (hippocratic)" : " (non-hippocratic)"));
  }
  print_kv(out, "arm 0", pb.arms().label0);
  print_kv(out, "arm 1", pb.arms().label1);
  const char* kind = c.kind == Criterion::Kind::MinimaxRegret ? "regret" : "value";
  print_kv(out, std::string(kind) + "(arm 0)", fmt9(rep.value0));
  print_kv(out, std::string(kind) + "(arm 1)", fmt9(rep.value1));
  print_kv(out, "chosen", rep.chosen);
  print_kv(out, "tie", rep.tie ? "true" : "false");
  if (rep.witness0) print_kv(out, "witness(arm 0)", matrix_str(rep.witness0->matrix()));
  if (rep.witness1) print_kv(out, "witness(arm 1)", matrix_str(rep.witness1->matrix()));
}

std::vector<Criterion> sweep_criteria(const DecisionProblem& pb) {
  std::vector<Criterion> list;
  if (pb.coupling()) list.push_back(Criterion::bayes(*pb.coupling()));
  list.push_back(Criterion::maxmin());
  list.push_back(Criterion::maxmax());
  list.push_back(Criterion::minimax_regret());
  list.push_back(Criterion::independence());
  list.push_back(Criterion::monotone());
  return list;
}

void csv_decision_row(std::ostream& csv, const std::optional<double>& lambda,
                      const std::string& criterion, const DecisionReport& rep) {
  csv << (lambda ? fmt9(*lambda) : "") << "," << criterion << "," << csv_field(rep.chosen) << ","
      << fmt9(rep.value0) << "," << fmt9(rep.value1) << "," << (rep.tie ? "true" : "false")
      << "\n";
}

// Scenario modes: the ethical reading waters lambda down toward 1 as
// self-medication becomes likely; the legal reading keeps it (or derives it
// from the lawsuit probability) regardless of q.
struct ScenarioModes {
  double lambda_ethical = 1.0;
  double lambda_legal = 1.0;
  DecisionReport ethical;
  DecisionReport legal;
};

std::optional<ScenarioModes> scenario_modes(const LoadedProblem& lp, const Criterion& c) {
  if (!lp.scenario.q || !lp.problem.hippocratic()) return std::nullopt;
  double lambda = lp.problem.hippocratic()->lambda;
  ScenarioModes modes;
  modes.lambda_ethical = effective_lambda(EffectiveLambdaSpec{lambda, *lp.scenario.q});
  modes.lambda_legal = lp.scenario.legal_constant && lp.scenario.lawsuit_probability
                           ? legal_lambda(*lp.scenario.legal_constant,
                                          *lp.scenario.lawsuit_probability)
                           : lambda;
  modes.ethical = decide(lp.problem.with_lambda(modes.lambda_ethical), c);
  modes.legal = decide(lp.problem.with_lambda(modes.lambda_legal), c);
  return modes;
}

void print_scenario_modes(std::ostream& out, const LoadedProblem& lp, const ScenarioModes& m) {
  print_kv(out, "q", fmt9(*lp.scenario.q));
  print_kv(out, "ethical mode",
           "effective lambda " + fmt9(m.lambda_ethical) + " -> chooses \"" + m.ethical.chosen +
               "\"" + (m.ethical.tie ? " (tie)" : ""));
  print_kv(out, "legal mode",
           "lambda " + fmt9(m.lambda_legal) + " -> chooses \"" + m.legal.chosen + "\"" +
               (m.legal.tie ? " (tie)" : ""));
}

// Returns true when something fired (dominance violation or label bias).
bool print_audits(std::ostream& out, const LoadedProblem& lp, const Criterion& c,
                  const Opts& opts) {
  const DecisionProblem& pb = lp.problem;
  bool fired = false;

  AdditivityReport add = additivity_check(pb.utility(), opts.tol);
  if (add.additive) {
    print_kv(out, "additivity", "additive");
  } else {
    const AdditivityWitness& w = *add.witness;
    std::ostringstream line;
    line << "non-additive, witness d=" << w.d << " y0 {" << w.a << "," << w.a2 << "} y1 {" << w.b
         << "," << w.b2 << "} second difference " << fmt9(w.second_difference);
    print_kv(out, "additivity", line.str());
  }

  SufficiencyReport suff =
      marginal_sufficiency_check(pb.utility(), pb.marginals(), opts.n_samples, opts.seed);
  print_kv(out, "marginal-suff.",
           std::string(suff.invariant ? "invariant" : "coupling-dependent") + ", spread " +
               fmt9(suff.spread) + " (n " + std::to_string(opts.n_samples) + ", seed " +
               std::to_string(opts.seed) + ")");

  std::optional<DominanceViolation> dom = dominance_audit(pb, c);
  if (dom) {
    fired = true;
    print_kv(out, "dominance",
             "VIOLATION: \"" + dom->dominant + "\" dominates but \"" + dom->chosen +
                 "\" chosen, witness " + matrix_str(dom->witness.matrix()));
  } else {
    print_kv(out, "dominance", "no violation");
  }

  if (pb.hippocratic()) {
    StatusQuoReport sq = status_quo_audit(pb, c);
    if (sq.indeterminate) {
      print_kv(out, "status-quo", "indeterminate (tie in at least one labeling)");
    } else {
      fired = fired || sq.biased;
      print_kv(out, "status-quo",
               std::string(sq.biased ? "BIASED" : "unbiased") + ": original \"" +
                   sq.original_choice + "\", relabeled \"" + sq.relabeled_choice + "\"");
    }
  } else {
    print_kv(out, "status-quo", "skipped (explicit utility table, no generating spec)");
  }

  if (auto modes = scenario_modes(lp, c)) print_scenario_modes(out, lp, *modes);
  return fired;
}

int cmd_decide(const Opts& opts, std::ostream& out, std::ostream& err) {
  LoadedProblem lp = load_problem(opts);
  Criterion c = make_criterion(opts);
  DecisionReport rep = decide(lp.problem, c);
  if (opts.format == "csv" || !opts.out_path.empty()) {
    std::ostringstream csv;
    csv << "lambda,criterion,chosen,value0,value1,tie\n";
    csv_decision_row(csv, rep.lambda_used, c.name(), rep);
    return deliver(csv.str(), opts, out, err);
  }
  print_report(out, lp.problem, c, rep);
  return 0;
}

int cmd_sweep(const Opts& opts, std::ostream& out, std::ostream& err) {
  LoadedProblem lp = load_problem(opts);
  if (!lp.problem.hippocratic())
    throw ValidationError("sweep requires a problem with a hippocratic utility");
  if (!(opts.step > 0.0)) throw ValidationError("sweep step must be positive");
  if (opts.lambda_to < opts.lambda_from)
    throw ValidationError("empty sweep range: lambda-to < lambda-from");

  std::ostringstream csv;
  csv << "lambda,criterion,chosen,value0,value1,tie\n";
  const double last = opts.lambda_to + opts.step * 1e-9;
  for (std::size_t k = 0;; ++k) {
    double lambda = opts.lambda_from + static_cast<double>(k) * opts.step;
    if (lambda > last) break;
    DecisionProblem pb = lp.problem.with_lambda(lambda);
    for (const Criterion& c : sweep_criteria(pb)) {
      DecisionReport rep = decide(pb, c);
      csv_decision_row(csv, lambda, c.name(), rep);
    }
  }
  return deliver(csv.str(), opts, out, err);
}

int cmd_audit(const Opts& opts, std::ostream& out, std::ostream& err) {
  LoadedProblem lp = load_problem(opts);
  Criterion c = make_criterion(opts);
  DecisionReport rep = decide(lp.problem, c);
  print_kv(out, "criterion", c.name());
  if (rep.lambda_used) print_kv(out, "lambda", fmt9(*rep.lambda_used));
  print_kv(out, "chosen", rep.chosen + (rep.tie ? " (tie)" : ""));
  bool fired = print_audits(out, lp, c, opts);
  (void)err;
  return fired && opts.strict ? 3 : 0;
}

int cmd_bounds(const Opts& opts, std::ostream& out, std::ostream& err) {
  LoadedProblem lp = load_problem(opts);
  const Marginals& m = lp.problem.marginals();
  const OutcomeSpace& space = lp.problem.space();
  if (opts.format == "csv" || !opts.out_path.empty()) {
    std::ostringstream csv;
    csv << "y0,y1,lo,hi\n";
    for (std::size_t a = 0; a < m.size(); ++a)
      for (std::size_t b = 0; b < m.size(); ++b) {
        CellBounds cb = cell_bounds(m, a, b);
        csv << csv_field(space.labels[a]) << "," << csv_field(space.labels[b]) << ","
            << fmt9(cb.lo) << "," << fmt9(cb.hi) << "\n";
      }
    return deliver(csv.str(), opts, out, err);
  }
  std::size_t width = 0;
  for (const std::string& label : space.labels) width = std::max(width, label.size());
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b) {
      CellBounds cb = cell_bounds(m, a, b);
      std::ostringstream key;
      key << "(" << space.labels[a] << ", " << space.labels[b] << ")";
      print_kv(out, key.str(), "[" + fmt9(cb.lo) + ", " + fmt9(cb.hi) + "]",
               static_cast<int>(2 * width + 6));
    }
  return 0;
}

int cmd_vertices(const Opts& opts, std::ostream& out, std::ostream& err) {
  LoadedProblem lp = load_problem(opts);
  std::vector<Coupling> verts = vertices(lp.problem.marginals());
  const OutcomeSpace& space = lp.problem.space();
  if (opts.format == "csv" || !opts.out_path.empty()) {
    std::ostringstream csv;
    csv << "vertex,y0,y1,mass\n";
    for (std::size_t k = 0; k < verts.size(); ++k)
      for (std::size_t a = 0; a < space.size(); ++a)
        for (std::size_t b = 0; b < space.size(); ++b)
          csv << k << "," << csv_field(space.labels[a]) << "," << csv_field(space.labels[b]) << ","
              << fmt9(verts[k](a, b)) << "\n";
    return deliver(csv.str(), opts, out, err);
  }
  out << verts.size() << " extreme coupling(s)\n";
  for (std::size_t k = 0; k < verts.size(); ++k) {
    std::ostringstream key;
    key << "vertex " << k;
    print_kv(out, key.str(),
             matrix_str(verts[k].matrix()) + "  harm mass " + fmt9(harm_mass(verts[k])));
  }
  return 0;
}

int cmd_example(const Opts& opts, std::ostream& out, std::ostream& err) {
  Opts local = opts;
  local.path.clear();
  LoadedProblem lp = load_problem(local);
  Criterion c = make_criterion(local);
  out << "built-in decision problem " << local.example_id << "\n";
  DecisionReport rep = decide(lp.problem, c);
  print_report(out, lp.problem, c, rep);
  out << "--\n";
  print_audits(out, lp, c, local);
  (void)err;
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Opts opts;
  CLI::App app{"decision engine and audit toolkit over couplings with fixed marginals"};
  app.name("strata");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool with_example) {
    sub->add_option("--problem", opts.path, "problem file (JSON)");
    if (with_example) sub->add_option("--example", opts.example_id, "built-in problem 1..4");
    sub->add_option("--lambda", opts.lambda, "hippocratic asymmetry weight")
        ->each([&](const std::string&) { opts.lambda_set = true; });
    return sub;
  };

  CLI::App* decide_cmd = add_common(app.add_subcommand("decide", "choose an arm"), true);
  decide_cmd->add_option("--criterion", opts.criterion,
                         "bayes|maxmin|maxmax|minimax-regret|independence|monotone");
  decide_cmd->add_option("--format", opts.format, "table|csv");
  decide_cmd->add_option("--out", opts.out_path, "write CSV to this path");

  CLI::App* sweep_cmd =
      add_common(app.add_subcommand("sweep", "CSV of decisions over a lambda grid"), true);
  sweep_cmd->add_option("--lambda-from", opts.lambda_from, "grid start (default 1)");
  sweep_cmd->add_option("--lambda-to", opts.lambda_to, "grid end (default 4)");
  sweep_cmd->add_option("--step", opts.step, "grid step (default 0.05)");
  sweep_cmd->add_option("--out", opts.out_path, "write CSV to this path");
  sweep_cmd->add_option("--seed", opts.seed, "random seed");

  CLI::App* audit_cmd = add_common(
      app.add_subcommand("audit", "additivity, marginal-sufficiency, dominance, status-quo"),
      true);
  audit_cmd->add_option("--criterion", opts.criterion, "criterion under audit");
  audit_cmd->add_option("--seed", opts.seed, "seed for the random couplings");
  audit_cmd->add_option("--tol", opts.tol, "additivity tolerance");
  audit_cmd->add_option("--n", opts.n_samples, "number of random couplings");
  audit_cmd->add_option("--q", opts.q, "self-medication probability under d=0")
      ->each([&](const std::string&) { opts.q_set = true; });
  audit_cmd->add_flag("--strict", opts.strict, "exit 3 when a violation is found");

  CLI::App* bounds_cmd =
      add_common(app.add_subcommand("bounds", "hard interval for every coupling cell"), true);
  bounds_cmd->add_option("--format", opts.format, "table|csv");
  bounds_cmd->add_option("--out", opts.out_path, "write CSV to this path");

  CLI::App* vertices_cmd =
      add_common(app.add_subcommand("vertices", "extreme couplings of the identified set"), true);
  vertices_cmd->add_option("--format", opts.format, "table|csv");
  vertices_cmd->add_option("--out", opts.out_path, "write CSV to this path");

  CLI::App* example_cmd =
      app.add_subcommand("example", "run a built-in decision problem with audits");
  example_cmd->add_option("--problem", opts.example_id, "built-in problem 1..4")->required();
  example_cmd->add_option("--criterion", opts.criterion, "criterion");
  example_cmd->add_option("--lambda", opts.lambda, "hippocratic asymmetry weight")
      ->each([&](const std::string&) { opts.lambda_set = true; });
  example_cmd->add_option("--q", opts.q, "self-medication probability (problem 4)")
      ->each([&](const std::string&) { opts.q_set = true; });
  example_cmd->add_option("--seed", opts.seed, "seed for the random couplings");
  example_cmd->add_option("--tol", opts.tol, "additivity tolerance");
  example_cmd->add_option("--n", opts.n_samples, "number of random couplings");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand(decide_cmd)) return cmd_decide(opts, out, err);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(opts, out, err);
    if (app.got_subcommand(audit_cmd)) return cmd_audit(opts, out, err);
    if (app.got_subcommand(bounds_cmd)) return cmd_bounds(opts, out, err);
    if (app.got_subcommand(vertices_cmd)) return cmd_vertices(opts, out, err);
    if (app.got_subcommand(example_cmd)) return cmd_example(opts, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace strata::cli
