#pragma once

// Red-black graph: the bipartite species/character graph a matrix with
// active characters induces, plus the realization moves that drive the
// reduction. A character's edges are all black (character still to be
// gained) or all red (character gained, still to be lost for the species
// on the red side). Graphs are value types; every operation returns a new
// graph and never mutates its argument.

#include "ppp/matrix.hpp"

#include <functional>
#include <memory>

namespace ppp {

enum class Sign { gain, loss };

struct SignedCharacter {
  std::size_t character = 0;
  Sign sign = Sign::gain;

  bool operator==(const SignedCharacter&) const = default;
};

using CReduction = std::vector<SignedCharacter>;

struct LabelTable {
  std::vector<std::string> species;
  std::vector<std::string> characters;
  std::vector<std::string> character_display;  // with merge aliases
};

class RBGraph {
 public:
  RBGraph() = default;

  static RBGraph create(std::shared_ptr<const LabelTable> labels,
                        Bitset species, Bitset characters, Bitset active,
                        std::vector<Bitset> adjacency) {
    RBGraph g;
    g.labels_ = std::move(labels);
    g.species_ = std::move(species);
    g.characters_ = std::move(characters);
    g.active_ = std::move(active);
    g.adj_ = std::move(adjacency);
    g.drop_isolated();
    return g;
  }

  std::size_t species_capacity() const { return species_.size(); }
  std::size_t character_capacity() const { return adj_.size(); }

  const Bitset& species() const { return species_; }
  const Bitset& characters() const { return characters_; }
  bool has_species(std::size_t s) const { return species_[s]; }
  bool has_character(std::size_t c) const { return characters_[c]; }
  bool is_active(std::size_t c) const { return active_[c]; }
  const Bitset& adjacency(std::size_t c) const { return adj_[c]; }

  bool empty() const { return species_.none() && characters_.none(); }
  std::size_t species_count() const { return species_.count(); }
  std::size_t character_count() const { return characters_.count(); }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (std::size_t c = characters_.find_first(); c != Bitset::npos;
         c = characters_.find_next(c))
      total += adj_[c].count();
    return total;
  }

  const LabelTable& labels() const { return *labels_; }
  const std::shared_ptr<const LabelTable>& labels_ptr() const { return labels_; }
  const std::string& species_name(std::size_t s) const { return labels_->species[s]; }
  const std::string& character_name(std::size_t c) const { return labels_->characters[c]; }
  const std::string& character_display(std::size_t c) const {
    return labels_->character_display[c];
  }

  std::size_t character_index(const std::string& name) const {
    for (std::size_t c = 0; c < labels_->characters.size(); ++c)
      if (labels_->characters[c] == name) return c;
    throw LookupError("unknown character: " + name);
  }

  bool operator==(const RBGraph& o) const {
    if (species_ != o.species_ || characters_ != o.characters_ ||
        active_ != o.active_)
      return false;
    for (std::size_t c = characters_.find_first(); c != Bitset::npos;
         c = characters_.find_next(c))
      if (adj_[c] != o.adj_[c]) return false;
    return true;
  }

  struct Component {
    Bitset species;
    Bitset characters;
  };

  // Connected components ordered by smallest member species index.
  std::vector<Component> components() const {
    std::vector<Component> out;
    Bitset seen_c(adj_.size());
    Bitset seen_s(species_.size());
    for (std::size_t s0 = species_.find_first(); s0 != Bitset::npos;
         s0 = species_.find_next(s0)) {
      if (seen_s[s0]) continue;
      Component comp{Bitset(species_.size()), Bitset(adj_.size())};
      std::vector<std::size_t> stack_s{s0};
      seen_s.set(s0);
      comp.species.set(s0);
      while (!stack_s.empty()) {
        std::size_t s = stack_s.back();
        stack_s.pop_back();
        for (std::size_t c = characters_.find_first(); c != Bitset::npos;
             c = characters_.find_next(c)) {
          if (seen_c[c] || !adj_[c][s]) continue;
          seen_c.set(c);
          comp.characters.set(c);
          for (std::size_t t = adj_[c].find_first(); t != Bitset::npos;
               t = adj_[c].find_next(t))
            if (!seen_s[t]) {
              seen_s.set(t);
              comp.species.set(t);
              stack_s.push_back(t);
            }
        }
      }
      out.push_back(std::move(comp));
    }
    return out;
  }

  // Species of the connected component containing character c.
  Bitset component_species_of(std::size_t c) const {
    Bitset frontier = adj_[c];
    Bitset seen_s = frontier;
    Bitset seen_c(adj_.size());
    seen_c.set(c);
    while (frontier.any()) {
      Bitset next(species_.size());
      for (std::size_t d = characters_.find_first(); d != Bitset::npos;
           d = characters_.find_next(d)) {
        if (seen_c[d]) continue;
        if ((adj_[d] & frontier).any()) {
          seen_c.set(d);
          next |= adj_[d] - seen_s;
        }
      }
      seen_s |= next;
      frontier = std::move(next);
    }
    return seen_s;
  }

  RBGraph restricted_to(const Component& comp) const {
    RBGraph g;
    g.labels_ = labels_;
    g.species_ = comp.species;
    g.characters_ = comp.characters;
    g.active_ = active_ & comp.characters;
    g.adj_.assign(adj_.size(), Bitset(species_.size()));
    for (std::size_t c = comp.characters.find_first(); c != Bitset::npos;
         c = comp.characters.find_next(c))
      g.adj_[c] = adj_[c];
    return g;
  }

  // --- mutation helpers for the realize operations (internal) ---

  void set_adjacency(std::size_t c, Bitset adj) { adj_[c] = std::move(adj); }
  void set_active(std::size_t c, bool v) { active_.set(c, v); }

  void drop_isolated() {
    Bitset covered(species_.size());
    for (std::size_t c = characters_.find_first(); c != Bitset::npos;
         c = characters_.find_next(c)) {
      if (adj_[c].none()) {
        characters_.reset(c);
        active_.reset(c);
      } else {
        covered |= adj_[c];
      }
    }
    species_ &= covered;
  }

 private:
  std::shared_ptr<const LabelTable> labels_;
  Bitset species_;     // present species vertices
  Bitset characters_;  // present character vertices
  Bitset active_;      // subset of characters_: red characters
  std::vector<Bitset> adj_;  // per character, adjacent species
};

inline std::string to_string(const RBGraph& g, const SignedCharacter& sc) {
  return g.character_display(sc.character) + (sc.sign == Sign::gain ? "+" : "-");
}

inline std::string to_string(const RBGraph& g, const CReduction& r) {
  std::string out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) out += " ";
    out += to_string(g, r[i]);
  }
  return out;
}

inline RBGraph from_matrix(const BinaryMatrix& m) {
  auto labels = std::make_shared<LabelTable>();
  labels->species = m.species_names();
  labels->characters = m.character_names();
  for (std::size_t c = 0; c < m.character_count(); ++c)
    labels->character_display.push_back(m.display_name(c));

  std::size_t n = m.species_count();
  std::size_t mm = m.character_count();
  std::vector<Bitset> adj(mm);
  for (std::size_t c = 0; c < mm; ++c)
    adj[c] = m.is_active(c) ? ~m.column(c) : m.column(c);
  Bitset species(n);
  species.set();
  Bitset characters(mm);
  characters.set();
  return RBGraph::create(std::move(labels), std::move(species),
                         std::move(characters), m.active(), std::move(adj));
}

// Matrix the graph stands for: M[s,c] = 1 iff (s,c) is a black edge, or c is
// active and (s,c) is not an edge. Rows/columns restricted to present
// vertices; the active set is read off the red edges.
inline BinaryMatrix associated_matrix(const RBGraph& g) {
  std::vector<std::size_t> srows, ccols;
  for (std::size_t s = g.species().find_first(); s != Bitset::npos;
       s = g.species().find_next(s))
    srows.push_back(s);
  for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
       c = g.characters().find_next(c))
    ccols.push_back(c);

  std::vector<std::string> species_names, character_names;
  for (std::size_t s : srows) species_names.push_back(g.species_name(s));
  for (std::size_t c : ccols) character_names.push_back(g.character_name(c));

  std::vector<Bitset> columns;
  Bitset active(ccols.size());
  for (std::size_t i = 0; i < ccols.size(); ++i) {
    std::size_t c = ccols[i];
    Bitset col(srows.size());
    for (std::size_t j = 0; j < srows.size(); ++j) {
      bool edge = g.adjacency(c)[srows[j]];
      col.set(j, g.is_active(c) ? !edge : edge);
    }
    columns.push_back(std::move(col));
    if (g.is_active(c)) active.set(i);
  }
  return BinaryMatrix(std::move(species_names), std::move(character_names),
                      std::move(columns), std::move(active));
}

// Active characters red-adjacent to every species of their own connected
// component; these must be realized negatively before anything else.
inline std::vector<std::size_t> free_characters(const RBGraph& g) {
  std::vector<std::size_t> out;
  for (const RBGraph::Component& comp : g.components())
    for (std::size_t c = comp.characters.find_first(); c != Bitset::npos;
         c = comp.characters.find_next(c))
      if (g.is_active(c) && g.adjacency(c) == comp.species) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

// Inactive characters black-adjacent to every species of their component.
inline std::vector<std::size_t> universal_characters(const RBGraph& g) {
  std::vector<std::size_t> out;
  for (const RBGraph::Component& comp : g.components())
    for (std::size_t c = comp.characters.find_first(); c != Bitset::npos;
         c = comp.characters.find_next(c))
      if (!g.is_active(c) && g.adjacency(c) == comp.species) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

enum class RealizeStatus {
  ok,
  not_found,     // character not present in the graph
  not_inactive,  // gain requested on an active character
  not_active,    // loss requested on an inactive character
  not_free,      // loss requested while some component species lacks the red edge
};

inline const char* to_string(RealizeStatus s) {
  switch (s) {
    case RealizeStatus::ok: return "ok";
    case RealizeStatus::not_found: return "character not in graph";
    case RealizeStatus::not_inactive: return "character already active";
    case RealizeStatus::not_active: return "character not active";
    case RealizeStatus::not_free: return "character not free";
  }
  return "?";
}

struct RealizeResult {
  RealizeStatus status = RealizeStatus::ok;
  RBGraph graph;
};

// Gain of c: c turns active, its edges become red edges to exactly the
// species of its component it was not black-adjacent to; isolated vertices
// fall out.
inline RealizeResult realize_positive(const RBGraph& g, std::size_t c) {
  if (c >= g.character_capacity() || !g.has_character(c))
    return {RealizeStatus::not_found, g};
  if (g.is_active(c)) return {RealizeStatus::not_inactive, g};
  RBGraph out = g;
  Bitset comp = g.component_species_of(c);
  out.set_adjacency(c, comp - g.adjacency(c));
  out.set_active(c, true);
  out.drop_isolated();
  return {RealizeStatus::ok, std::move(out)};
}

// Loss of c: only defined while c is free (red-adjacent to all species of
// its component); deletes c and whatever becomes isolated.
inline RealizeResult realize_negative(const RBGraph& g, std::size_t c) {
  if (c >= g.character_capacity() || !g.has_character(c))
    return {RealizeStatus::not_found, g};
  if (!g.is_active(c)) return {RealizeStatus::not_active, g};
  if (g.adjacency(c) != g.component_species_of(c))
    return {RealizeStatus::not_free, g};
  RBGraph out = g;
  out.set_adjacency(c, Bitset(g.species_capacity()));
  out.drop_isolated();
  return {RealizeStatus::ok, std::move(out)};
}

inline RealizeResult realize(const RBGraph& g, const SignedCharacter& sc) {
  return sc.sign == Sign::gain ? realize_positive(g, sc.character)
                               : realize_negative(g, sc.character);
}

// A red sigma-graph is an induced red path s1 - c1 - s2 - c2 - s3 over two
// active characters; it certifies that no successful reduction exists from
// here. Exists iff two active characters have properly overlapping red
// neighborhoods.
inline bool has_red_sigma(const RBGraph& g) {
  std::vector<std::size_t> act;
  for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
       c = g.characters().find_next(c))
    if (g.is_active(c)) act.push_back(c);
  for (std::size_t i = 0; i < act.size(); ++i)
    for (std::size_t j = i + 1; j < act.size(); ++j) {
      const Bitset& a = g.adjacency(act[i]);
      const Bitset& b = g.adjacency(act[j]);
      if ((a & b).any() && (a - b).any() && (b - a).any()) return true;
    }
  return false;
}

constexpr std::size_t npos = static_cast<std::size_t>(-1);

struct ApplyResult {
  RealizeStatus status = RealizeStatus::ok;
  std::size_t failed_index = npos;  // position in R of the failing gain
  RBGraph graph;
  CReduction extended;  // signed characters actually realized, in order
};

using ApplyObserver =
    std::function<void(const RBGraph&, const SignedCharacter&)>;

// Applies a c-reduction (gains only). Losses are forced moves: whenever a
// character is free it is realized negatively, smallest index first, before
// the next gain (and before the first gain, should the input graph already
// hold a free character). The extended sequence records every move.
inline ApplyResult apply_creduction(const RBGraph& g, const CReduction& r,
                                    const ApplyObserver& observe = {}) {
  ApplyResult res;
  res.graph = g;
  if (r.empty()) return res;

  auto flush_free = [&]() {
    for (;;) {
      std::vector<std::size_t> free = free_characters(res.graph);
      if (free.empty()) return;
      SignedCharacter sc{free.front(), Sign::loss};
      RealizeResult rr = realize_negative(res.graph, sc.character);
      res.graph = std::move(rr.graph);
      res.extended.push_back(sc);
      if (observe) observe(res.graph, sc);
    }
  };

  flush_free();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].sign != Sign::gain) return {RealizeStatus::not_inactive, i,
                                         std::move(res.graph), std::move(res.extended)};
    RealizeResult rr = realize_positive(res.graph, r[i].character);
    if (rr.status != RealizeStatus::ok)
      return {rr.status, i, std::move(res.graph), std::move(res.extended)};
    res.graph = std::move(rr.graph);
    res.extended.push_back(r[i]);
    if (observe) observe(res.graph, r[i]);
    flush_free();
  }
  return res;
}

// Graphviz rendering: species as circles, characters as boxes (doubled
// border when active), black edges solid, red edges red.
inline std::string to_dot(const RBGraph& g) {
  std::string out = "graph redblack {\n";
  for (std::size_t s = g.species().find_first(); s != Bitset::npos;
       s = g.species().find_next(s))
    out += "  \"" + g.species_name(s) + "\" [shape=circle];\n";
  for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
       c = g.characters().find_next(c)) {
    out += "  \"" + g.character_display(c) + "\" [shape=box";
    if (g.is_active(c)) out += ", peripheries=2";
    out += "];\n";
  }
  for (std::size_t c = g.characters().find_first(); c != Bitset::npos;
       c = g.characters().find_next(c))
    for (std::size_t s = g.adjacency(c).find_first(); s != Bitset::npos;
         s = g.adjacency(c).find_next(s)) {
      out += "  \"" + g.species_name(s) + "\" -- \"" + g.character_display(c) + "\"";
      out += g.is_active(c) ? " [color=red]" : " [color=black]";
      out += ";\n";
    }
  out += "}\n";
  return out;
}

}  // namespace ppp
