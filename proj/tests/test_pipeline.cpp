#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "ppp/cli.hpp"

using namespace ppp;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string sample_file() {
  static std::string path = [] {
    auto p = std::filesystem::temp_directory_path() / "ppsolve_test_sample.txt";
    std::ofstream(p) << th::sample_text();
    return p.string();
  }();
  return path;
}

}  // namespace

TEST_CASE("solve_matrix assembles verdict, tree and report") {
  SolveResult r = solve_matrix(th::sample());
  CHECK(r.verdict == SolveVerdict::has_phylogeny);
  CHECK(r.preprocess_report.no_change());
  REQUIRE(r.tree.has_value());
  CHECK(r.validation.ok);
  CHECK_FALSE(r.invalid_tree_diagnostic);
  CHECK(r.outcome.trace.sequence.size() == 12);

  SolveResult bad = solve_matrix(parse_matrix(th::unsolvable_text()));
  CHECK(bad.verdict == SolveVerdict::no_phylogeny);
  CHECK_FALSE(bad.tree.has_value());
  CHECK(bad.outcome.abort.reason == "no safe source");
}

TEST_CASE("solve_matrix handles preprocessing-only instances") {
  SolveResult r = solve_matrix(parse_matrix("0\n"));
  CHECK(r.verdict == SolveVerdict::has_phylogeny);
  CHECK(r.matrix.empty());
  REQUIRE(r.tree.has_value());
  CHECK(to_newick(*r.tree).empty());
}

TEST_CASE("first_decision_diagram stops where a diagram is needed") {
  auto dp = first_decision_diagram(th::sample_graph());
  REQUIRE(dp.has_value());
  // the universal c8 was realized on the way: s1 is gone
  CHECK_FALSE(dp->graph.has_species(0));
  REQUIRE(dp->diagram.nodes.size() == 3);
  CHECK(dp->diagram.sources().size() == 2);
  CHECK(dp->diagram.sinks().size() == 1);

  // laminar instances reduce by universal gains and free losses alone
  CHECK_FALSE(first_decision_diagram(from_matrix(parse_matrix("1 1\n1 0\n")))
                  .has_value());
  CHECK_FALSE(first_decision_diagram(RBGraph()).has_value());
}

TEST_CASE("cli solve prints a newick tree") {
  CliRun r = run({"solve", "-"}, th::sample_text());
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  REQUIRE_FALSE(r.out.empty());
  CHECK(r.out.back() == '\n');
  CHECK(r.out.find("c4-") != std::string::npos);

  // the printed tree round-trips through the verifier
  BinaryMatrix m = th::sample();
  std::string nw = r.out.substr(0, r.out.size() - 1);
  PersistentTree t = parse_newick(nw, m);
  CHECK(validate_tree(t, m).ok);

  // byte-for-byte deterministic
  CliRun again = run({"solve", "-"}, th::sample_text());
  CHECK(again.out == r.out);
  CHECK(again.err == r.err);
  CHECK(again.code == r.code);
}

TEST_CASE("cli solve reads files and honors --seed as a no-op") {
  CliRun from_file = run({"solve", sample_file()});
  CliRun from_stdin = run({"solve", "-"}, th::sample_text());
  CliRun seeded = run({"solve", sample_file(), "--seed", "7"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out == from_stdin.out);
  CHECK(seeded.out == from_stdin.out);
}

TEST_CASE("cli solve trace format matches the library serialization") {
  CliRun r = run({"solve", "-", "--format", "trace"}, th::sample_text());
  CHECK(r.code == 0);
  BinaryMatrix m = th::sample();
  ReduceOutcome out = reduce(from_matrix(m));
  CHECK(r.out == serialize_trace(from_matrix(m), out.trace));
}

TEST_CASE("cli solve dot format renders the tree") {
  CliRun r = run({"solve", "-", "--format", "dot"}, th::sample_text());
  CHECK(r.code == 0);
  CHECK(r.out.rfind("digraph tree {", 0) == 0);
  CHECK(r.out.find("s6") != std::string::npos);
  CHECK(r.out.find("style=filled") != std::string::npos);
}

TEST_CASE("cli solve json summary") {
  CliRun r = run({"solve", "-", "--format", "json-summary"}, th::sample_text());
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == "ppsolve-summary/1");
  CHECK(j["verdict"] == "has-phylogeny");
  CHECK(j["input"]["species"] == 6);
  CHECK(j["input"]["characters"] == 8);
  CHECK(j["input"]["active"] == nlohmann::json::array({"c4"}));
  CHECK(j["preprocess"]["removed_species"].empty());
  CHECK(j["counters"]["moves"] == 12);
  // the sample's two losses are flushed inside the {c5} realization, so no
  // top-level free-negative events fire
  CHECK(j["counters"]["free_losses"] == 0);
  CHECK(j["counters"]["universal_gains"] == 3);
  CHECK(j["counters"]["component_splits"] == 0);
  CHECK(j["counters"]["source_realizations"] == 4);
  REQUIRE(j["reduction"].size() == 12);
  CHECK(j["reduction"][0] == "c8+");
  CHECK(j["reduction"][11] == "c7+");
  REQUIRE(j["sources"].size() == 4);
  CHECK(j["sources"][0]["state"] == nlohmann::json::array({"c2"}));
  CHECK(j["sources"][0]["degenerate"] == false);
  CHECK(j["sources"][3]["state"] == nlohmann::json::array({"c1"}));
  CHECK(j["sources"][3]["degenerate"] == true);
  CHECK(j["invalid_tree"] == false);
  CHECK(j.contains("tree"));
  CHECK_FALSE(j.contains("abort"));

  // no wall-clock or other run-varying fields anywhere
  CliRun again = run({"solve", "-", "--format", "json-summary"}, th::sample_text());
  CHECK(again.out == r.out);
}

TEST_CASE("cli solve reports unsolvable inputs") {
  CliRun r = run({"solve", "-"}, th::unsolvable_text());
  CHECK(r.code == 1);
  CHECK(r.out == "no persistent phylogeny\n");

  CliRun j = run({"solve", "-", "--format", "json-summary"}, th::unsolvable_text());
  CHECK(j.code == 1);
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["verdict"] == "no-phylogeny");
  CHECK(doc["abort"]["reason"] == "no safe source");
  CHECK(doc["abort"]["component_path"].empty());
  CHECK_FALSE(doc.contains("tree"));
}

TEST_CASE("cli solve cross-checks against the oracle") {
  CliRun ok = run({"solve", "-", "--cross-check", "--oracle-budget", "30"},
                  th::sample_text());
  CHECK(ok.code == 0);
  CHECK(ok.err == "cross-check ok: oracle agrees (solvable)\n");

  CliRun skipped = run({"solve", "-", "--cross-check"}, th::sample_text());
  CHECK(skipped.code == 0);
  CHECK(skipped.err ==
        "cross-check skipped: 26 unknown cells exceed the budget of 20\n");

  CliRun neg = run({"solve", "-", "--cross-check"}, th::unsolvable_text());
  CHECK(neg.code == 1);
  CHECK(neg.err == "cross-check ok: oracle agrees (unsolvable)\n");
}

TEST_CASE("cli oracle prints verdict and witness") {
  CliRun r = run({"oracle", "-", "--oracle-budget", "29"}, th::sample_text());
  CHECK(r.code == 0);
  CHECK(r.err == "unknown cells: 26\n");
  REQUIRE(r.out.rfind("solvable\n", 0) == 0);
  BinaryMatrix completion = parse_matrix(r.out.substr(9), true);
  CHECK(completion.character_count() == 16);
  CHECK(completion.species_count() == 6);
  CHECK(perfect_phylogeny_test(completion));

  CliRun capped = run({"oracle", "-"}, th::sample_text());
  CHECK(capped.code == 4);
  CHECK(capped.out == "over-budget\n");

  CliRun neg = run({"oracle", "-"}, th::unsolvable_text());
  CHECK(neg.code == 1);
  CHECK(neg.out == "unsolvable\n");
  CHECK(neg.err == "unknown cells: 0\n");
}

TEST_CASE("cli verify judges trees") {
  CliRun solved = run({"solve", sample_file()});
  REQUIRE(solved.code == 0);

  CliRun valid = run({"verify", sample_file(), "--tree", "-"}, solved.out);
  CHECK(valid.code == 0);
  CHECK(valid.out == "valid\n");

  // swapping two species names breaks the state/row match
  std::string tampered = solved.out;
  tampered.replace(tampered.find("s3"), 2, "sX");
  tampered.replace(tampered.find("s4"), 2, "s3");
  tampered.replace(tampered.find("sX"), 2, "s4");
  CliRun invalid = run({"verify", sample_file(), "--tree", "-"}, tampered);
  CHECK(invalid.code == 1);
  CHECK(invalid.out.rfind("invalid: condition 5", 0) == 0);

  CliRun garbage = run({"verify", sample_file(), "--tree", "-"}, "(((");
  CHECK(garbage.code == 2);
  CHECK(garbage.err.find("tree input error") != std::string::npos);

  CliRun both = run({"verify", "-", "--tree", "-"}, "");
  CHECK(both.code == 2);
  CHECK(both.err.find("stdin") != std::string::npos);
}

TEST_CASE("cli inspectors render dot") {
  CliRun g = run({"inspect-graph", "-"}, th::sample_text());
  CHECK(g.code == 0);
  CHECK(g.out.rfind("graph redblack {", 0) == 0);
  CHECK(g.out.find("color=red") != std::string::npos);

  // inspect-graph shows the raw matrix: duplicate columns stay separate
  CliRun raw = run({"inspect-graph", "-"}, "1 1\n0 0\n1 0\n");
  CHECK(raw.out.find("\"c1\"") != std::string::npos);
  CHECK(raw.out.find("\"c2\"") != std::string::npos);

  CliRun h = run({"inspect-hasse", "-"}, th::sample_text());
  CHECK(h.code == 0);
  CHECK(h.err.empty());
  CHECK(h.out.find("{c2,c3}") != std::string::npos);
  std::size_t sources = 0, pos = 0;
  while ((pos = h.out.find("(source)", pos)) != std::string::npos)
    ++sources, ++pos;
  CHECK(sources == 2);
  CHECK(h.out.find("(sink)") != std::string::npos);

  CliRun none = run({"inspect-hasse", "-"}, "1 1\n1 0\n");
  CHECK(none.code == 0);
  CHECK(none.out == "digraph hasse {\n}\n");
  CHECK(none.err ==
        "note: the reduction never consulted a diagram on this input\n");
}

TEST_CASE("cli --active overrides the directive") {
  // same matrix body as the sample, directive stripped
  std::string body;
  std::istringstream in(th::sample_text());
  std::string line;
  std::getline(in, line);  // drop "#active: c4"
  while (std::getline(in, line)) body += line + "\n";

  CliRun overridden = run({"solve", "-", "--active", "c4"}, body);
  CliRun direct = run({"solve", "-"}, th::sample_text());
  CHECK(overridden.code == direct.code);
  CHECK(overridden.out == direct.out);

  // clearing the directive changes the instance
  CliRun cleared = run({"solve", "-", "--active", ""}, th::sample_text());
  CHECK(cleared.out != direct.out);

  CliRun unknown = run({"solve", "-", "--active", "c99"}, th::sample_text());
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("--active") != std::string::npos);
}

TEST_CASE("cli rejects bad usage") {
  CliRun parse_err = run({"solve", "-"}, "0 1\n0 1 1\n");
  CHECK(parse_err.code == 2);
  CHECK(parse_err.err.find("input error") != std::string::npos);

  CliRun bad_format = run({"solve", "-", "--format", "yaml"}, th::sample_text());
  CHECK(bad_format.code == 2);

  CliRun bad_cmd = run({"frobnicate"});
  CHECK(bad_cmd.code == 2);

  CliRun no_cmd = run({});
  CHECK(no_cmd.code == 2);

  CliRun missing_file = run({"solve", "/nonexistent/matrix.txt"});
  CHECK(missing_file.code == 2);
  CHECK(missing_file.err.find("cannot open") != std::string::npos);

  CliRun strict = run({"solve", "-", "--strict-names"}, "0 1\n1 0\n");
  CHECK(strict.code == 2);
}

TEST_CASE("cli help exits cleanly") {
  CliRun help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("ppsolve") != std::string::npos);

  CliRun sub_help = run({"solve", "--help"});
  CHECK(sub_help.code == 0);
  CHECK(sub_help.out.find("--cross-check") != std::string::npos);
}

TEST_CASE("cli handles instances that preprocess to nothing") {
  CliRun r = run({"solve", "-"}, "0\n");
  CHECK(r.code == 0);
  CHECK(r.out.empty());

  CliRun j = run({"solve", "-", "--format", "json-summary"}, "0\n");
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["verdict"] == "has-phylogeny");
  CHECK(doc["tree"] == "");
  CHECK(doc["preprocess"]["removed_species"] ==
        nlohmann::json::array({"s1"}));
  CHECK(doc["preprocess"]["removed_characters"] ==
        nlohmann::json::array({"c1"}));
}
