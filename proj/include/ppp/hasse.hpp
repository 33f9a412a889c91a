#pragma once

// Hasse diagram machinery for the safe-source step of the reduction.
//
// For a connected graph the candidate characters are the maximal inactive
// ones (no other inactive character's species set strictly contains
// theirs). Species states over those characters, ordered by strict set
// inclusion, form a DAG whose source-to-sink paths ("chains") propose
// c-reductions; a source is kept when one of its chains realizes cleanly on
// the induced subgraph and its own state realizes on the full graph without
// ever creating a red sigma-graph.

#include "ppp/redblack.hpp"

namespace ppp {

// Inactive characters whose species set is not strictly contained in the
// species set of any other inactive character. Ascending index order.
inline std::vector<std::size_t> maximal_characters(const RBGraph& g) {
  std::vector<std::size_t> inactive;
  for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
       c = g.characters().find_next(c))
    if (!g.is_active(c)) inactive.push_back(c);
  std::vector<std::size_t> out;
  for (std::size_t c : inactive) {
    bool dominated = false;
    for (std::size_t d : inactive)
      if (d != c && g.adjacency(c).is_proper_subset_of(g.adjacency(d))) {
        dominated = true;
        break;
      }
    if (!dominated) out.push_back(c);
  }
  return out;
}

// Subgraph on the given characters and the species adjacent to them.
inline RBGraph induced_subgraph(const RBGraph& g,
                                const std::vector<std::size_t>& chars) {
  RBGraph::Component comp{Bitset(g.species_capacity()),
                          Bitset(g.character_capacity())};
  for (std::size_t c : chars) {
    if (!g.has_character(c)) throw LookupError("character not in graph");
    comp.characters.set(c);
    comp.species |= g.adjacency(c);
  }
  return g.restricted_to(comp);
}

struct HasseNode {
  Bitset state;                      // subset of the maximal characters
  std::vector<std::size_t> species;  // original species indices, ascending
};

class HasseDiagram {
 public:
  std::vector<HasseNode> nodes;               // sorted by state, see below
  std::vector<std::vector<std::size_t>> out;  // covering arcs u -> v
  std::vector<std::vector<std::size_t>> in;

  std::vector<std::size_t> sources() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (in[i].empty()) v.push_back(i);
    return v;
  }
  std::vector<std::size_t> sinks() const {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (out[i].empty()) v.push_back(i);
    return v;
  }
  bool degenerate() const {
    for (const auto& o : out)
      if (!o.empty()) return false;
    return true;
  }
  std::size_t arc_count() const {
    std::size_t total = 0;
    for (const auto& o : out) total += o.size();
    return total;
  }
  Bitset arc_label(std::size_t u, std::size_t v) const {
    return nodes[v].state - nodes[u].state;
  }
};

inline std::vector<std::size_t> state_characters(const Bitset& state) {
  std::vector<std::size_t> v;
  for (std::size_t c = state.find_first(); c != Bitset::npos;
       c = state.find_next(c))
    v.push_back(c);
  return v;
}

// Orders states as ascending index sequences, shorter prefix first.
inline bool state_less(const Bitset& a, const Bitset& b) {
  std::vector<std::size_t> av = state_characters(a);
  std::vector<std::size_t> bv = state_characters(b);
  return std::lexicographical_compare(av.begin(), av.end(), bv.begin(), bv.end());
}

// pre: gm is an all-inactive induced subgraph (a maximal-character graph).
inline HasseDiagram build_diagram(const RBGraph& gm) {
  std::vector<std::pair<Bitset, std::size_t>> states;  // state, species
  for (std::size_t s = gm.species().find_first(); s != Bitset::npos;
       s = gm.species().find_next(s)) {
    Bitset st(gm.character_capacity());
    for (std::size_t c = gm.characters().find_first(); c != Bitset::npos;
         c = gm.characters().find_next(c))
      if (gm.adjacency(c)[s]) st.set(c);
    states.emplace_back(std::move(st), s);
  }

  HasseDiagram d;
  for (auto& [st, s] : states) {
    auto it = std::find_if(d.nodes.begin(), d.nodes.end(),
                           [&](const HasseNode& n) { return n.state == st; });
    if (it == d.nodes.end())
      d.nodes.push_back(HasseNode{st, {s}});
    else
      it->species.push_back(s);
  }
  std::sort(d.nodes.begin(), d.nodes.end(),
            [](const HasseNode& a, const HasseNode& b) {
              return state_less(a.state, b.state);
            });
  for (HasseNode& n : d.nodes) std::sort(n.species.begin(), n.species.end());

  std::size_t k = d.nodes.size();
  d.out.assign(k, {});
  d.in.assign(k, {});
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) {
      if (u == v || !d.nodes[u].state.is_proper_subset_of(d.nodes[v].state))
        continue;
      bool covering = true;
      for (std::size_t w = 0; w < k && covering; ++w)
        if (w != u && w != v &&
            d.nodes[u].state.is_proper_subset_of(d.nodes[w].state) &&
            d.nodes[w].state.is_proper_subset_of(d.nodes[v].state))
          covering = false;
      if (covering) {
        d.out[u].push_back(v);
        d.in[v].push_back(u);
      }
    }
  return d;
}

inline bool is_degenerate(const HasseDiagram& d) { return d.degenerate(); }

struct Chain {
  std::vector<std::size_t> nodes;  // node indices, source first
};

struct ChainEnumeration {
  std::vector<Chain> chains;
  bool overflow = false;
};

// All source-to-sink paths in node order, capped.
inline ChainEnumeration chains(const HasseDiagram& d, std::size_t cap) {
  ChainEnumeration res;
  std::vector<std::size_t> path;
  std::function<bool(std::size_t)> dfs = [&](std::size_t u) -> bool {
    path.push_back(u);
    if (d.out[u].empty()) {
      if (res.chains.size() >= cap) {
        res.overflow = true;
        path.pop_back();
        return false;
      }
      res.chains.push_back(Chain{path});
    } else {
      for (std::size_t v : d.out[u])
        if (!dfs(v)) {
          path.pop_back();
          return false;
        }
    }
    path.pop_back();
    return true;
  };
  for (std::size_t u : d.sources())
    if (!dfs(u)) break;
  return res;
}

// Gains proposed by a chain: the source state, then each arc label, each
// block in ascending character order.
inline CReduction chain_creduction(const HasseDiagram& d, const Chain& ch) {
  CReduction r;
  for (std::size_t c : state_characters(d.nodes[ch.nodes.front()].state))
    r.push_back({c, Sign::gain});
  for (std::size_t i = 1; i < ch.nodes.size(); ++i)
    for (std::size_t c :
         state_characters(d.arc_label(ch.nodes[i - 1], ch.nodes[i])))
      r.push_back({c, Sign::gain});
  return r;
}

namespace detail {

// Realizes the gains on a copy and demands no red sigma-graph at any
// intermediate step (losses included).
inline bool realizes_sigma_free(const RBGraph& g, const CReduction& r) {
  bool clean = !has_red_sigma(g);
  ApplyResult res = apply_creduction(g, r, [&](const RBGraph& h, const SignedCharacter&) {
    clean = clean && !has_red_sigma(h);
  });
  return clean && res.status == RealizeStatus::ok;
}

}  // namespace detail

inline bool is_safe_chain(const RBGraph& gm, const HasseDiagram& d,
                          const Chain& ch) {
  return detail::realizes_sigma_free(gm, chain_creduction(d, ch));
}

struct SafeSourceResult {
  std::vector<std::size_t> sources;  // node indices, in node (state) order
  bool chain_overflow = false;
};

// Safe-source candidates of diagram d for graph g (d built from g's
// maximal-character subgraph), in the order the reduction should try them.
// A source qualifies when some chain of its realizes cleanly on the induced
// subgraph and its own state realizes cleanly on g. In the degenerate
// (arcless) diagram, sources whose state coincides with the full inactive
// character set of an actual species are listed first: they are the
// preferred starting states, but the others stay on the list because a
// species-state source can pass every local test and still lead nowhere.
inline SafeSourceResult safe_sources(const RBGraph& g, const HasseDiagram& d,
                                     std::size_t chain_cap = npos) {
  SafeSourceResult res;
  if (d.nodes.empty()) return res;

  RBGraph gm = induced_subgraph(g, maximal_characters(g));
  if (chain_cap == npos)
    chain_cap = std::max<std::size_t>(
        1, g.species_count() * g.character_count() * g.character_count());
  ChainEnumeration en = chains(d, chain_cap);
  if (en.overflow) {
    res.chain_overflow = true;
    return res;
  }

  std::vector<char> has_safe_chain(d.nodes.size(), 0);
  for (const Chain& ch : en.chains)
    if (!has_safe_chain[ch.nodes.front()] && is_safe_chain(gm, d, ch))
      has_safe_chain[ch.nodes.front()] = 1;

  std::vector<std::size_t> candidates;
  for (std::size_t u : d.sources()) {
    if (!has_safe_chain[u]) continue;
    CReduction r;
    for (std::size_t c : state_characters(d.nodes[u].state))
      r.push_back({c, Sign::gain});
    if (detail::realizes_sigma_free(g, r)) candidates.push_back(u);
  }

  if (is_degenerate(d)) {
    auto is_species_state = [&](std::size_t u) {
      for (std::size_t s = g.species().find_first(); s != Bitset::npos;
           s = g.species().find_next(s)) {
        Bitset inact(g.character_capacity());
        for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
             c = g.characters().find_next(c))
          if (!g.is_active(c) && g.adjacency(c)[s]) inact.set(c);
        if (inact == d.nodes[u].state) return true;
      }
      return false;
    };
    std::vector<std::size_t> preferred, rest;
    for (std::size_t u : candidates)
      (is_species_state(u) ? preferred : rest).push_back(u);
    candidates = std::move(preferred);
    candidates.insert(candidates.end(), rest.begin(), rest.end());
  }

  res.sources = std::move(candidates);
  return res;
}

// Graphviz rendering: one box per state with its species, arcs labeled by
// the gained characters, sources and sinks marked.
inline std::string to_dot(const RBGraph& g, const HasseDiagram& d) {
  auto state_label = [&](const Bitset& st) {
    std::string s = "{";
    bool first = true;
    for (std::size_t c : state_characters(st)) {
      if (!first) s += ",";
      s += g.character_display(c);
      first = false;
    }
    return s + "}";
  };
  std::string outstr = "digraph hasse {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    std::string label = state_label(d.nodes[i].state) + "\\n";
    for (std::size_t j = 0; j < d.nodes[i].species.size(); ++j) {
      if (j) label += ",";
      label += g.species_name(d.nodes[i].species[j]);
    }
    std::string marks;
    if (d.in[i].empty()) marks += " source";
    if (d.out[i].empty()) marks += " sink";
    if (!marks.empty()) label += "\\n(" + marks.substr(1) + ")";
    outstr += "  n" + std::to_string(i) + " [shape=box, label=\"" + label + "\"";
    if (d.in[i].empty()) outstr += ", penwidth=2";
    outstr += "];\n";
  }
  for (std::size_t u = 0; u < d.nodes.size(); ++u)
    for (std::size_t v : d.out[u]) {
      std::string label;
      for (std::size_t c : state_characters(d.arc_label(u, v))) {
        if (!label.empty()) label += ",";
        label += g.character_display(c);
      }
      outstr += "  n" + std::to_string(u) + " -> n" + std::to_string(v) +
                " [label=\"" + label + "\"];\n";
    }
  outstr += "}\n";
  return outstr;
}

}  // namespace ppp
