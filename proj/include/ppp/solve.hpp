#pragma once

// End-to-end pipeline: preprocess the matrix, reduce its red-black graph,
// build the tree from the trace, validate. A reduction that succeeds but
// yields an invalid tree is reported as "no phylogeny" with a diagnostic
// flag, never as success.

#include "ppp/reduce.hpp"
#include "ppp/treebuild.hpp"

namespace ppp {

enum class SolveVerdict { has_phylogeny, no_phylogeny };

struct SolveResult {
  BinaryMatrix matrix;  // preprocessed matrix the solver ran on
  PreprocessReport preprocess_report;
  ReduceOutcome outcome;
  std::optional<PersistentTree> tree;  // present iff has_phylogeny
  ValidationResult validation;
  bool invalid_tree_diagnostic = false;  // reduce succeeded, tree did not
  SolveVerdict verdict = SolveVerdict::no_phylogeny;
};

inline SolveResult solve_matrix(const BinaryMatrix& input) {
  SolveResult r;
  auto [pm, report] = preprocess(input);
  r.matrix = std::move(pm);
  r.preprocess_report = std::move(report);

  r.outcome = reduce(from_matrix(r.matrix));
  if (!r.outcome.success) return r;

  try {
    PersistentTree t = build_tree(r.matrix, r.outcome.trace);
    r.validation = validate_tree(t, r.matrix);
    if (r.validation.ok) {
      r.tree = std::move(t);
      r.verdict = SolveVerdict::has_phylogeny;
    } else {
      r.invalid_tree_diagnostic = true;
    }
  } catch (const BuildError& e) {
    r.invalid_tree_diagnostic = true;
    r.validation = ValidationResult{false, 0, e.what()};
  }
  return r;
}

struct DecisionPoint {
  RBGraph graph;         // graph at the first safe-source decision
  HasseDiagram diagram;  // diagram of its maximal characters
};

// Runs the reduction's forced moves (losses, universal gains, component
// descent in solver order) up to the first point where a diagram gets
// consulted; nullopt when the graph reduces without one.
inline std::optional<DecisionPoint> first_decision_diagram(const RBGraph& g) {
  if (g.empty()) return std::nullopt;

  std::vector<std::size_t> free = free_characters(g);
  if (!free.empty())
    return first_decision_diagram(realize_negative(g, free.front()).graph);

  std::vector<std::size_t> universal = universal_characters(g);
  if (!universal.empty())
    return first_decision_diagram(realize_positive(g, universal.front()).graph);

  std::vector<RBGraph::Component> comps = g.components();
  if (comps.size() > 1) {
    for (const RBGraph::Component& comp : comps)
      if (auto r = first_decision_diagram(g.restricted_to(comp))) return r;
    return std::nullopt;
  }

  RBGraph gm = induced_subgraph(g, maximal_characters(g));
  return DecisionPoint{g, build_diagram(gm)};
}

}  // namespace ppp
