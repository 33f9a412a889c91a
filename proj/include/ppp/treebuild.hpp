#pragma once

// Persistent trees: nodes carry a full character-state vector and optional
// species labels; each edge carries the ordered signed characters gained or
// lost along it. Built from a reduction trace by replaying it on the graph,
// validated directly against the defining conditions, exported as Newick
// (edge labels as [comments]) or DOT.

#include "ppp/reduce.hpp"

#include <cctype>

namespace ppp {

struct TreeNode {
  Bitset state;                       // length = character count
  std::vector<std::size_t> species;   // species placed at this node
  std::size_t parent = npos;          // npos for the root
  std::vector<SignedCharacter> edge;  // labels on the edge from the parent
  std::vector<std::size_t> children;
};

struct PersistentTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root when non-empty
  std::shared_ptr<const LabelTable> labels;
  std::size_t character_count = 0;

  bool empty() const { return nodes.empty(); }
};

struct BuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Replays the trace on from_matrix(M). Every species of a component points
// at the tree node its state has reached ("tip"); realizing a character
// hangs one new node under its component's tip and advances the whole
// component there. A species whose row equals a node's state is placed the
// moment that node appears; realization then isolates it out of the graph.
inline PersistentTree build_tree(const BinaryMatrix& m,
                                 const ReductionTrace& trace) {
  RBGraph g = from_matrix(m);

  PersistentTree t;
  t.character_count = m.character_count();
  t.labels = g.labels_ptr();

  TreeNode root;
  root.state = m.active();
  t.nodes.push_back(std::move(root));

  std::vector<char> placed(m.species_count(), 0);
  auto place_matching = [&](std::size_t node) {
    for (std::size_t s = 0; s < m.species_count(); ++s)
      if (!placed[s] && m.row(s) == t.nodes[node].state) {
        placed[s] = 1;
        t.nodes[node].species.push_back(s);
      }
  };
  place_matching(0);

  std::vector<std::size_t> tip(m.species_count(), 0);
  for (const SignedCharacter& sc : trace.sequence) {
    if (sc.character >= g.character_capacity() || !g.has_character(sc.character))
      throw BuildError("trace realizes an absent character: " +
                       std::to_string(sc.character + 1));
    Bitset comp = g.component_species_of(sc.character);
    if (comp.none())
      throw BuildError("realized character has no component species");
    std::size_t u = tip[comp.find_first()];
    for (std::size_t s = comp.find_first(); s != Bitset::npos;
         s = comp.find_next(s))
      if (tip[s] != u)
        throw BuildError("component species disagree on their tree tip");

    TreeNode v;
    v.state = t.nodes[u].state;
    if (sc.sign == Sign::gain) {
      if (v.state[sc.character])
        throw BuildError("gain of an already-present character");
      v.state.set(sc.character);
    } else {
      if (!v.state[sc.character])
        throw BuildError("loss of an absent character");
      v.state.reset(sc.character);
    }
    v.parent = u;
    v.edge = {sc};
    std::size_t vid = t.nodes.size();
    t.nodes.push_back(std::move(v));
    t.nodes[u].children.push_back(vid);

    RealizeResult rr = realize(g, sc);
    if (rr.status != RealizeStatus::ok)
      throw BuildError(std::string("trace step failed to realize: ") +
                       to_string(rr.status));
    g = std::move(rr.graph);

    for (std::size_t s = comp.find_first(); s != Bitset::npos;
         s = comp.find_next(s))
      tip[s] = vid;
    place_matching(vid);
  }

  if (!g.empty()) throw BuildError("trace did not empty the graph");
  for (std::size_t s = 0; s < m.species_count(); ++s)
    if (!placed[s])
      throw BuildError("species never placed: " + m.species_name(s));
  return t;
}

struct ValidationResult {
  bool ok = true;
  int condition = 0;  // first violated condition, 1..5
  std::string detail;
};

// Conditions:
//   1. structure: one root, consistent links, states of the right length
//   2. root state marks exactly the active characters
//   3. each edge's labels flip cleanly from parent state to child state
//   4. per character at most one gain and one loss edge, gain above loss
//   5. every species labels a node whose state equals its row, exactly once
inline ValidationResult validate_tree(const PersistentTree& t,
                                      const BinaryMatrix& m) {
  auto fail = [](int cond, std::string d) {
    return ValidationResult{false, cond, std::move(d)};
  };

  if (t.nodes.empty()) {
    if (m.species_count() == 0) return {};
    return fail(5, "empty tree cannot place any species");
  }

  std::size_t mm = m.character_count();
  if (t.nodes[0].parent != npos) return fail(1, "node 0 is not a root");
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    if (n.state.size() != mm)
      return fail(1, "node " + std::to_string(i) + " has a state of wrong length");
    if (i != 0 && (n.parent == npos || n.parent >= t.nodes.size()))
      return fail(1, "node " + std::to_string(i) + " has no valid parent");
    for (std::size_t c : n.children) {
      if (c >= t.nodes.size() || t.nodes[c].parent != i)
        return fail(1, "parent/child links disagree at node " + std::to_string(i));
    }
  }
  {  // every non-root node hangs under the root
    std::vector<char> seen(t.nodes.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t c : t.nodes[u].children)
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
      if (!seen[i])
        return fail(1, "node " + std::to_string(i) + " unreachable from the root");
  }

  if (t.nodes[0].state != m.active())
    return fail(2, "root state does not mark the active characters");

  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    if (n.edge.empty())
      return fail(3, "edge into node " + std::to_string(i) + " carries no label");
    Bitset st = t.nodes[n.parent].state;
    for (const SignedCharacter& sc : n.edge) {
      if (sc.character >= mm)
        return fail(3, "edge label names character index out of range");
      if (sc.sign == Sign::gain) {
        if (st[sc.character])
          return fail(3, "gain of already-present " + m.display_name(sc.character) +
                             " on edge into node " + std::to_string(i));
        st.set(sc.character);
      } else {
        if (!st[sc.character])
          return fail(3, "loss of absent " + m.display_name(sc.character) +
                             " on edge into node " + std::to_string(i));
        st.reset(sc.character);
      }
    }
    if (st != n.state)
      return fail(3, "edge labels do not produce the state of node " +
                         std::to_string(i));
  }

  {
    std::vector<std::size_t> gain_at(mm, npos), loss_at(mm, npos);
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
      for (const SignedCharacter& sc : t.nodes[i].edge) {
        auto& slot = sc.sign == Sign::gain ? gain_at : loss_at;
        if (slot[sc.character] != npos)
          return fail(4, m.display_name(sc.character) +
                             (sc.sign == Sign::gain ? " gained" : " lost") +
                             " on two edges");
        slot[sc.character] = i;
      }
    for (std::size_t c = 0; c < mm; ++c) {
      if (gain_at[c] == npos || loss_at[c] == npos) continue;
      // walk up from the loss edge's upper endpoint; the gain edge's lower
      // endpoint must appear (gain above loss on one path)
      std::size_t w = t.nodes[loss_at[c]].parent;
      bool above = false;
      for (; w != npos; w = t.nodes[w].parent)
        if (w == gain_at[c]) {
          above = true;
          break;
        }
      if (!above)
        return fail(4, m.display_name(c) + " not gained above its loss");
    }
  }

  {
    std::vector<std::size_t> where(m.species_count(), npos);
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
      for (std::size_t s : t.nodes[i].species) {
        if (s >= m.species_count())
          return fail(5, "species index out of range at node " + std::to_string(i));
        if (where[s] != npos)
          return fail(5, m.species_name(s) + " labeled twice");
        where[s] = i;
      }
    for (std::size_t s = 0; s < m.species_count(); ++s) {
      if (where[s] == npos)
        return fail(5, m.species_name(s) + " not placed on any node");
      if (t.nodes[where[s]].state != m.row(s))
        return fail(5, m.species_name(s) + " placed at a node with a different state");
    }
  }
  return {};
}

namespace detail {

inline std::string tree_node_name(const PersistentTree& t, std::size_t i) {
  const TreeNode& n = t.nodes[i];
  if (n.species.empty()) return i == 0 ? "root" : "";
  std::string s;
  for (std::size_t j = 0; j < n.species.size(); ++j) {
    if (j) s += "+";
    s += t.labels->species[n.species[j]];
  }
  return s;
}

inline std::string tree_edge_label(const PersistentTree& t, const TreeNode& n) {
  std::string s;
  for (std::size_t j = 0; j < n.edge.size(); ++j) {
    if (j) s += ",";
    s += t.labels->character_display[n.edge[j].character];
    s += n.edge[j].sign == Sign::gain ? "+" : "-";
  }
  return s;
}

// A tree that says nothing: no nodes, or a bare unlabeled root.
inline bool trivial_tree(const PersistentTree& t) {
  return t.nodes.empty() ||
         (t.nodes.size() == 1 && t.nodes[0].species.empty() &&
          t.nodes[0].children.empty());
}

}  // namespace detail

inline std::string to_newick(const PersistentTree& t) {
  if (detail::trivial_tree(t)) return "";
  std::function<std::string(std::size_t)> rec = [&](std::size_t i) {
    std::string s;
    const TreeNode& n = t.nodes[i];
    if (!n.children.empty()) {
      s += "(";
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        if (j) s += ",";
        s += rec(n.children[j]);
      }
      s += ")";
    }
    s += detail::tree_node_name(t, i);
    if (i != 0) s += "[" + detail::tree_edge_label(t, n) + "]";
    return s;
  };
  return rec(0) + ";";
}

inline std::string to_dot(const PersistentTree& t) {
  if (detail::trivial_tree(t)) return "";
  std::string out = "digraph tree {\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"" +
           detail::tree_node_name(t, i) + "\"";
    if (!t.nodes[i].species.empty())
      out += ", style=filled, fillcolor=lightgrey";
    out += "];\n";
  }
  for (std::size_t i = 1; i < t.nodes.size(); ++i)
    out += "  n" + std::to_string(t.nodes[i].parent) + " -> n" +
           std::to_string(i) + " [label=\"" +
           detail::tree_edge_label(t, t.nodes[i]) + "\"];\n";
  out += "}\n";
  return out;
}

namespace detail {

struct NewickScanner {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      throw BuildError(std::string("newick: expected '") + c + "' at offset " +
                       std::to_string(pos));
    ++pos;
  }
  std::string label() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() &&
           std::string("(),;[]").find(s[pos]) == std::string::npos &&
           !std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
    return s.substr(start, pos - start);
  }
  std::string comment() {
    expect('[');
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != ']') ++pos;
    if (pos >= s.size()) throw BuildError("newick: unterminated [comment]");
    std::string out = s.substr(start, pos - start);
    ++pos;
    return out;
  }
};

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline SignedCharacter parse_signed_token(const std::string& tok,
                                          const BinaryMatrix& m) {
  if (tok.size() < 2 || (tok.back() != '+' && tok.back() != '-'))
    throw BuildError("newick: malformed signed character '" + tok + "'");
  std::string name = tok.substr(0, tok.size() - 1);
  std::size_t c;
  try {
    c = m.character_index(name);
  } catch (const LookupError&) {
    auto bar = name.find('|');
    if (bar == std::string::npos)
      throw BuildError("newick: unknown character '" + name + "'");
    try {
      c = m.character_index(name.substr(0, bar));
    } catch (const LookupError&) {
      throw BuildError("newick: unknown character '" + name + "'");
    }
  }
  return {c, tok.back() == '+' ? Sign::gain : Sign::loss};
}

}  // namespace detail

// Parses a tree this module's to_newick produced (or a hand-written one in
// the same dialect) against the matrix it claims to explain. Node states
// are re-derived from the edge labels; inconsistent flips are errors. The
// label "root" on the outermost node means an unlabeled root.
inline PersistentTree parse_newick(const std::string& text,
                                   const BinaryMatrix& m) {
  detail::NewickScanner in{text};
  in.skip_ws();
  if (in.pos == text.size()) return {};  // empty document, empty tree

  PersistentTree t;
  t.character_count = m.character_count();
  auto labels = std::make_shared<LabelTable>();
  labels->species = m.species_names();
  labels->characters = m.character_names();
  for (std::size_t c = 0; c < m.character_count(); ++c)
    labels->character_display.push_back(m.display_name(c));
  t.labels = labels;

  std::vector<std::string> raw_label, raw_comment;
  std::function<std::size_t()> parse_node = [&]() -> std::size_t {
    std::size_t idx = t.nodes.size();
    t.nodes.push_back(TreeNode{});
    raw_label.emplace_back();
    raw_comment.emplace_back();
    if (in.peek('(')) {
      in.expect('(');
      for (;;) {
        std::size_t child = parse_node();
        t.nodes[idx].children.push_back(child);
        t.nodes[child].parent = idx;
        if (in.peek(',')) {
          in.expect(',');
          continue;
        }
        break;
      }
      in.expect(')');
    }
    raw_label[idx] = in.label();
    if (in.peek('[')) raw_comment[idx] = in.comment();
    return idx;
  };
  parse_node();
  in.expect(';');
  in.skip_ws();
  if (in.pos != text.size())
    throw BuildError("newick: trailing input after ';'");

  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    if (i == 0) {
      if (!raw_comment[0].empty())
        throw BuildError("newick: the root cannot carry an edge [comment]");
    } else {
      if (raw_comment[i].empty())
        throw BuildError("newick: edge into '" + raw_label[i] +
                         "' carries no [comment] labels");
      for (const std::string& tok : detail::split_on(raw_comment[i], ','))
        t.nodes[i].edge.push_back(detail::parse_signed_token(tok, m));
    }
    const std::string& lbl = raw_label[i];
    if (lbl.empty() || (i == 0 && lbl == "root")) continue;
    for (const std::string& piece : detail::split_on(lbl, '+')) {
      try {
        t.nodes[i].species.push_back(m.species_index(piece));
      } catch (const LookupError&) {
        throw BuildError("newick: unknown species '" + piece + "'");
      }
    }
  }

  // re-derive states from the root down, leniently: validate_tree is the
  // place where impossible flips get reported (condition 3)
  t.nodes[0].state = m.active();
  std::vector<std::size_t> order{0};
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t c : t.nodes[order[k]].children) order.push_back(c);
  for (std::size_t k = 1; k < order.size(); ++k) {
    TreeNode& n = t.nodes[order[k]];
    n.state = t.nodes[n.parent].state;
    for (const SignedCharacter& sc : n.edge)
      n.state.set(sc.character, sc.sign == Sign::gain);
  }
  return t;
}

}  // namespace ppp
