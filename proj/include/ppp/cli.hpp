#pragma once

// Command-line driver behind tools/ppsolve. Kept in a header taking explicit
// streams so the test suite can run whole invocations in-process and assert
// on exit codes and bytes.
//
// Exit codes: 0 positive decision (tree built / oracle solvable / tree
// valid), 1 negative decision, 2 input or usage error, 3 cross-check
// mismatch, 4 oracle over budget.

#include "ppp/oracle.hpp"
#include "ppp/solve.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>

namespace ppp {

namespace detail {

struct CliError {
  int code;
  std::string message;
};

inline std::string read_all(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") return read_all(in);
  std::ifstream f(path);
  if (!f) throw CliError{2, "cannot open input file: " + path};
  return read_all(f);
}

inline BinaryMatrix load_matrix(const std::string& path, std::istream& in,
                                bool strict,
                                const std::optional<std::string>& active) {
  BinaryMatrix m;
  try {
    m = parse_matrix(read_input(path, in), strict);
  } catch (const ParseError& e) {
    throw CliError{2, std::string("input error: ") + e.what()};
  }
  if (active) {
    Bitset act(m.character_count());
    std::string names = *active;
    std::replace(names.begin(), names.end(), ',', ' ');
    std::istringstream ss(names);
    std::string name;
    while (ss >> name) {
      try {
        act.set(m.character_index(name));
      } catch (const LookupError& e) {
        throw CliError{2, std::string("input error: --active: ") + e.what()};
      }
    }
    std::vector<Bitset> cols;
    for (std::size_t c = 0; c < m.character_count(); ++c)
      cols.push_back(m.column(c));
    m = BinaryMatrix(m.species_names(), m.character_names(), std::move(cols),
                     std::move(act));
  }
  return m;
}

inline nlohmann::ordered_json solve_summary(const BinaryMatrix& input,
                                            const SolveResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "ppsolve-summary/1";
  j["verdict"] = r.verdict == SolveVerdict::has_phylogeny ? "has-phylogeny"
                                                          : "no-phylogeny";

  nlohmann::ordered_json in_j;
  in_j["species"] = input.species_count();
  in_j["characters"] = input.character_count();
  std::vector<std::string> act;
  for (std::size_t c = 0; c < input.character_count(); ++c)
    if (input.is_active(c)) act.push_back(input.character_name(c));
  in_j["active"] = act;
  j["input"] = in_j;

  nlohmann::ordered_json pre;
  pre["removed_species"] = r.preprocess_report.removed_null_species;
  pre["removed_characters"] = r.preprocess_report.removed_null_characters;
  auto merged = nlohmann::ordered_json::array();
  for (const auto& [kept, dropped] : r.preprocess_report.merged_duplicate_columns)
    merged.push_back({kept, dropped});
  pre["merged_columns"] = merged;
  j["preprocess"] = pre;

  RBGraph g = from_matrix(r.matrix);
  std::vector<std::string> seq;
  for (const SignedCharacter& sc : r.outcome.trace.sequence)
    seq.push_back(to_string(g, sc));
  j["reduction"] = seq;

  auto sources = nlohmann::ordered_json::array();
  std::size_t splits = 0, frees = 0, universals = 0;
  for (const TraceEvent& ev : r.outcome.trace.events) {
    switch (ev.kind) {
      case TraceEventKind::component_split: ++splits; break;
      case TraceEventKind::free_negative: ++frees; break;
      case TraceEventKind::universal_positive: ++universals; break;
      case TraceEventKind::source_realization: {
        nlohmann::ordered_json s;
        std::vector<std::string> state;
        for (std::size_t c : ev.state) state.push_back(g.character_display(c));
        s["state"] = state;
        s["degenerate"] = ev.degenerate;
        s["conflict_free_submatrix"] = ev.gm_conflict_free;
        sources.push_back(s);
        break;
      }
      default: break;
    }
  }
  j["sources"] = sources;

  nlohmann::ordered_json counters;
  counters["moves"] = r.outcome.trace.sequence.size();
  counters["free_losses"] = frees;
  counters["universal_gains"] = universals;
  counters["component_splits"] = splits;
  counters["source_realizations"] = sources.size();
  j["counters"] = counters;

  if (!r.outcome.success) {
    nlohmann::ordered_json a;
    a["component_path"] = r.outcome.abort.component_path;
    a["reason"] = r.outcome.abort.reason;
    j["abort"] = a;
  }
  j["invalid_tree"] = r.invalid_tree_diagnostic;
  if (r.tree) j["tree"] = to_newick(*r.tree);
  return j;
}

inline int do_solve(const std::string& input_path, std::istream& in,
                    std::ostream& out, std::ostream& err,
                    const std::string& format, bool strict,
                    const std::optional<std::string>& active, bool cross,
                    std::size_t budget) {
  BinaryMatrix input = load_matrix(input_path, in, strict, active);
  SolveResult r = solve_matrix(input);

  int code = r.verdict == SolveVerdict::has_phylogeny ? 0 : 1;
  if (r.invalid_tree_diagnostic)
    err << "note: reduction succeeded but its tree failed validation ("
        << r.validation.detail << "); reporting no phylogeny\n";

  if (cross) {
    OracleResult o = solve_bruteforce(r.matrix, budget);
    if (o.verdict == OracleVerdict::over_budget) {
      err << "cross-check skipped: " << o.unknowns
          << " unknown cells exceed the budget of " << budget << "\n";
    } else {
      bool oracle_yes = o.verdict == OracleVerdict::solvable;
      bool mine = r.verdict == SolveVerdict::has_phylogeny;
      if (oracle_yes != mine) {
        err << "cross-check mismatch: reduction says "
            << (mine ? "solvable" : "unsolvable") << ", oracle says "
            << to_string(o.verdict) << "\n";
        code = 3;
      } else {
        err << "cross-check ok: oracle agrees ("
            << to_string(o.verdict) << ")\n";
      }
    }
  }

  if (format == "json-summary") {
    out << solve_summary(input, r).dump(2) << "\n";
    return code;
  }
  if (r.verdict != SolveVerdict::has_phylogeny) {
    out << "no persistent phylogeny\n";
    return code;
  }
  if (format == "newick") {
    std::string s = to_newick(*r.tree);
    if (!s.empty()) out << s << "\n";
  } else if (format == "dot") {
    out << to_dot(*r.tree);
  } else if (format == "trace") {
    out << serialize_trace(from_matrix(r.matrix), r.outcome.trace);
  }
  return code;
}

inline int do_oracle(const std::string& input_path, std::istream& in,
                     std::ostream& out, std::ostream& err, bool strict,
                     const std::optional<std::string>& active,
                     std::size_t budget) {
  BinaryMatrix input = load_matrix(input_path, in, strict, active);
  auto [pm, report] = preprocess(input);
  OracleResult o = solve_bruteforce(pm, budget);
  err << "unknown cells: " << o.unknowns << "\n";
  out << to_string(o.verdict) << "\n";
  if (o.completion) out << serialize_matrix(*o.completion);
  switch (o.verdict) {
    case OracleVerdict::solvable: return 0;
    case OracleVerdict::unsolvable: return 1;
    case OracleVerdict::over_budget: return 4;
  }
  return 2;
}

inline int do_inspect_graph(const std::string& input_path, std::istream& in,
                            std::ostream& out, bool strict,
                            const std::optional<std::string>& active) {
  BinaryMatrix input = load_matrix(input_path, in, strict, active);
  out << to_dot(from_matrix(input));
  return 0;
}

inline int do_inspect_hasse(const std::string& input_path, std::istream& in,
                            std::ostream& out, std::ostream& err, bool strict,
                            const std::optional<std::string>& active) {
  BinaryMatrix input = load_matrix(input_path, in, strict, active);
  auto [pm, report] = preprocess(input);
  std::optional<DecisionPoint> dp = first_decision_diagram(from_matrix(pm));
  if (!dp) {
    out << "digraph hasse {\n}\n";
    err << "note: the reduction never consulted a diagram on this input\n";
    return 0;
  }
  out << to_dot(dp->graph, dp->diagram);
  return 0;
}

inline int do_verify(const std::string& input_path, const std::string& tree_path,
                     std::istream& in, std::ostream& out, std::ostream& err,
                     bool strict, const std::optional<std::string>& active) {
  if (input_path == "-" && tree_path == "-")
    throw CliError{2, "matrix and tree cannot both come from stdin"};
  BinaryMatrix input = load_matrix(input_path, in, strict, active);
  auto [pm, report] = preprocess(input);
  std::string tree_text = read_input(tree_path, in);
  PersistentTree t;
  try {
    t = parse_newick(tree_text, pm);
  } catch (const BuildError& e) {
    throw CliError{2, std::string("tree input error: ") + e.what()};
  }
  ValidationResult v = validate_tree(t, pm);
  if (v.ok) {
    out << "valid\n";
    return 0;
  }
  out << "invalid: condition " << v.condition << ": " << v.detail << "\n";
  return 1;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::istream& in,
                   std::ostream& out, std::ostream& err) {
  CLI::App app{"persistent phylogeny solver"};
  app.name("ppsolve");
  app.require_subcommand(1);

  std::string input = "-";
  std::string format = "newick";
  std::optional<std::string> active;
  std::string tree_path;
  bool strict = false;
  bool cross = false;
  std::size_t budget = 20;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("input", input, "matrix file, or - for stdin");
    cmd->add_flag("--strict-names", strict,
                  "require a header line and named rows");
    cmd->add_option("--active", active,
                    "override the active characters (comma-separated names)");
    cmd->add_option("--seed", seed, "reserved; the pipeline is deterministic");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "decide and build a tree");
  add_common(solve_cmd);
  solve_cmd->add_option("--format", format, "newick, dot, trace, json-summary")
      ->check(CLI::IsMember({"newick", "dot", "trace", "json-summary"}));
  solve_cmd->add_flag("--cross-check", cross,
                      "also run the brute-force oracle and compare verdicts");
  solve_cmd->add_option("--oracle-budget", budget,
                        "max unknown cells the oracle may enumerate");

  CLI::App* graph_cmd =
      app.add_subcommand("inspect-graph", "render the red-black graph");
  add_common(graph_cmd);
  std::string inspect_format = "dot";
  graph_cmd->add_option("--format", inspect_format, "dot")
      ->check(CLI::IsMember({"dot"}));

  CLI::App* hasse_cmd = app.add_subcommand(
      "inspect-hasse", "render the diagram at the first safe-source decision");
  add_common(hasse_cmd);
  hasse_cmd->add_option("--format", inspect_format, "dot")
      ->check(CLI::IsMember({"dot"}));

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "brute-force verdict plus witness");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--oracle-budget", budget,
                         "max unknown cells to enumerate");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "validate a Newick tree against a matrix");
  add_common(verify_cmd);
  verify_cmd->add_option("--tree", tree_path, "tree file, or - for stdin")
      ->required();

  std::vector<const char*> argv;
  argv.push_back("ppsolve");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(solve_cmd))
      return detail::do_solve(input, in, out, err, format, strict, active,
                              cross, budget);
    if (app.got_subcommand(graph_cmd))
      return detail::do_inspect_graph(input, in, out, strict, active);
    if (app.got_subcommand(hasse_cmd))
      return detail::do_inspect_hasse(input, in, out, err, strict, active);
    if (app.got_subcommand(oracle_cmd))
      return detail::do_oracle(input, in, out, err, strict, active, budget);
    if (app.got_subcommand(verify_cmd))
      return detail::do_verify(input, tree_path, in, out, err, strict, active);
  } catch (const detail::CliError& e) {
    err << e.message << "\n";
    return e.code;
  }
  err << "no command selected\n";
  return 2;
}

}  // namespace ppp
