#pragma once

// Recursive reduction: drive a red-black graph to the empty graph by forced
// losses, universal gains, component splits, and safe-source realizations,
// in that priority order. Safe sources are tried in diagram order with
// rollback, since a locally safe source can still strand the graph later.
// Produces the extended c-reduction together with the branch events the
// tree builder and the trace format need, or aborts when every candidate
// is exhausted.

#include "ppp/hasse.hpp"

namespace ppp {

enum class TraceEventKind {
  singleton_removal,
  free_negative,
  universal_positive,
  component_split,
  source_realization,
};

struct TraceEvent {
  TraceEventKind kind = TraceEventKind::free_negative;
  std::size_t seq_index = 0;  // position in the sequence this event precedes

  // component_split only
  std::size_t component_index = 0;
  std::size_t component_count = 0;

  // source_realization only
  std::vector<std::size_t> state;  // character indices, ascending
  bool degenerate = false;         // diagram had no arcs
  bool gm_conflict_free = true;    // maximal subgraph's matrix conflict-free
};

struct ReductionTrace {
  CReduction sequence;  // extended: every realized move, gains and losses
  std::vector<TraceEvent> events;
};

struct AbortInfo {
  std::vector<std::size_t> component_path;  // component index per split level
  std::string reason;
};

struct ReduceOutcome {
  bool success = false;
  ReductionTrace trace;  // on abort: the moves made up to the abort point
  AbortInfo abort;       // meaningful only when !success
};

namespace detail {

inline bool conflict_free(const RBGraph& gm) {
  BinaryMatrix b = associated_matrix(gm);
  for (std::size_t i = 0; i < b.character_count(); ++i)
    for (std::size_t j = i + 1; j < b.character_count(); ++j)
      if (conflicting(b, i, j)) return false;
  return true;
}

inline bool reduce_impl(const RBGraph& g, std::vector<std::size_t>& path,
                        ReduceOutcome& out, std::size_t depth,
                        std::size_t guard) {
  if (depth > guard)
    throw std::logic_error("reduction exceeded its recursion bound (bug)");
  if (g.empty()) return true;

  std::vector<std::size_t> free = free_characters(g);
  if (!free.empty()) {
    out.trace.events.push_back(
        {TraceEventKind::free_negative, out.trace.sequence.size()});
    RealizeResult rr = realize_negative(g, free.front());
    if (rr.status != RealizeStatus::ok)
      throw std::logic_error("free character failed to realize (bug)");
    out.trace.sequence.push_back({free.front(), Sign::loss});
    return reduce_impl(rr.graph, path, out, depth + 1, guard);
  }

  std::vector<std::size_t> universal = universal_characters(g);
  if (!universal.empty()) {
    out.trace.events.push_back(
        {TraceEventKind::universal_positive, out.trace.sequence.size()});
    RealizeResult rr = realize_positive(g, universal.front());
    if (rr.status != RealizeStatus::ok)
      throw std::logic_error("universal character failed to realize (bug)");
    out.trace.sequence.push_back({universal.front(), Sign::gain});
    return reduce_impl(rr.graph, path, out, depth + 1, guard);
  }

  std::vector<RBGraph::Component> comps = g.components();
  if (comps.size() > 1) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      TraceEvent ev{TraceEventKind::component_split, out.trace.sequence.size()};
      ev.component_index = i;
      ev.component_count = comps.size();
      out.trace.events.push_back(ev);
      path.push_back(i);
      bool ok = reduce_impl(g.restricted_to(comps[i]), path, out, depth + 1, guard);
      path.pop_back();
      if (!ok) return false;  // abort info already recorded at the failure
    }
    return true;
  }

  RBGraph gm = induced_subgraph(g, maximal_characters(g));
  HasseDiagram diagram = build_diagram(gm);
  SafeSourceResult ss = safe_sources(g, diagram);
  if (ss.chain_overflow) {
    out.abort = {path, "chain enumeration overflow"};
    return false;
  }
  if (ss.sources.empty()) {
    out.abort = {path, "no safe source"};
    return false;
  }

  // A source can pass every local safety test and still lead to a dead end
  // a few levels down, so candidates are tried in order and rolled back on
  // failure. A solvable graph always has at least one source that stems from
  // an actual solution tree, hence exhausting the list certifies failure;
  // in practice the first candidate almost always succeeds.
  bool gmcf = conflict_free(gm);
  bool overflow_seen = false;
  for (std::size_t src : ss.sources) {
    std::size_t seq_mark = out.trace.sequence.size();
    std::size_t ev_mark = out.trace.events.size();

    TraceEvent ev{TraceEventKind::source_realization, seq_mark};
    ev.state = state_characters(diagram.nodes[src].state);
    ev.degenerate = is_degenerate(diagram);
    ev.gm_conflict_free = gmcf;
    out.trace.events.push_back(ev);

    CReduction r;
    for (std::size_t c : ev.state) r.push_back({c, Sign::gain});
    ApplyResult ar = apply_creduction(g, r);
    if (ar.status != RealizeStatus::ok)
      throw std::logic_error("safe source failed to realize (bug)");
    for (const SignedCharacter& sc : ar.extended)
      out.trace.sequence.push_back(sc);
    if (reduce_impl(ar.graph, path, out, depth + 1, guard)) return true;

    if (out.abort.reason == "chain enumeration overflow") overflow_seen = true;
    out.trace.sequence.resize(seq_mark);
    out.trace.events.resize(ev_mark);
  }
  // an unexplored branch hidden behind a chain cap means "unsolvable" would
  // be uncertified, so the overflow reason wins
  out.abort = {path,
               overflow_seen ? "chain enumeration overflow" : "no safe source"};
  return false;
}

}  // namespace detail

// Depth bound: every realize level consumes a signed character (at most 2m
// of those exist) and every split level loses at least one species per
// branch (at most n of those on one path), plus the empty base level.
inline ReduceOutcome reduce(const RBGraph& g) {
  ReduceOutcome out;
  RBGraph start = g;
  std::size_t before = start.species_count() + start.character_count();
  start.drop_isolated();  // defensive; graphs normally never hold singletons
  if (start.species_count() + start.character_count() != before)
    out.trace.events.push_back({TraceEventKind::singleton_removal, 0});

  std::vector<std::size_t> path;
  std::size_t guard =
      2 * start.character_count() + start.species_count() + 2;
  out.success = detail::reduce_impl(start, path, out, 0, guard);
  return out;
}

// Explicit entry point for disconnected graphs; reduce already splits into
// components in the same order, so this is the same computation.
inline ReduceOutcome reduce_components(const RBGraph& g) { return reduce(g); }

// One signed character per line, branch events as # comments.
inline std::string serialize_trace(const RBGraph& g, const ReductionTrace& t) {
  std::string out;
  std::size_t e = 0;
  auto emit_events_at = [&](std::size_t pos) {
    for (; e < t.events.size() && t.events[e].seq_index == pos; ++e) {
      const TraceEvent& ev = t.events[e];
      switch (ev.kind) {
        case TraceEventKind::singleton_removal:
          out += "# singletons removed\n";
          break;
        case TraceEventKind::free_negative:
          out += "# free negative\n";
          break;
        case TraceEventKind::universal_positive:
          out += "# universal positive\n";
          break;
        case TraceEventKind::component_split:
          out += "# component " + std::to_string(ev.component_index + 1) +
                 " of " + std::to_string(ev.component_count) + "\n";
          break;
        case TraceEventKind::source_realization: {
          out += "# source {";
          for (std::size_t i = 0; i < ev.state.size(); ++i) {
            if (i) out += ",";
            out += g.character_display(ev.state[i]);
          }
          out += "}";
          if (ev.degenerate) out += " degenerate";
          out += "\n";
          break;
        }
      }
    }
  };
  for (std::size_t i = 0; i < t.sequence.size(); ++i) {
    emit_events_at(i);
    out += to_string(g, t.sequence[i]) + "\n";
  }
  emit_events_at(t.sequence.size());
  return out;
}

struct ReplayResult {
  bool ok = false;              // all gains realized and the graph ended empty
  bool sigma_free = true;       // no red sigma-graph at entry or after any move
  bool ended_empty = false;
  bool sequence_match = false;  // realized moves equal the given sequence
  RealizeStatus status = RealizeStatus::ok;
  std::size_t failed_index = npos;
  RBGraph final_graph;
};

// Replays a reduction's positive characters through apply_creduction and
// checks the forced losses land exactly where the sequence says they do.
inline ReplayResult replay(const RBGraph& g, const CReduction& sequence) {
  CReduction gains;
  for (const SignedCharacter& sc : sequence)
    if (sc.sign == Sign::gain) gains.push_back(sc);

  ReplayResult res;
  res.sigma_free = !has_red_sigma(g);
  ApplyResult ar = apply_creduction(
      g, gains, [&](const RBGraph& h, const SignedCharacter&) {
        if (has_red_sigma(h)) res.sigma_free = false;
      });
  res.status = ar.status;
  res.failed_index = ar.failed_index;
  res.ended_empty = ar.graph.empty();
  res.sequence_match = ar.extended == sequence;
  res.ok = ar.status == RealizeStatus::ok && res.ended_empty;
  res.final_graph = std::move(ar.graph);
  return res;
}

}  // namespace ppp
