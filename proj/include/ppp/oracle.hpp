#pragma once

// Independent brute-force decision procedure. A matrix with active set A is
// solvable iff the doubled matrix (columns c+ and c-) admits a completion of
// its unknown cells that a plain zero-rooted compatibility test accepts:
//
//   M[s,c]=1, c inactive  ->  (c+,c-) = (1,0)
//   M[s,c]=0, c inactive  ->  (c+,c-) in {(0,0),(1,1)}   (one unknown)
//   c active              ->  c+ = 1 everywhere, c- = 1 exactly where M=0
//
// The search walks characters in index order, enumerating each character's
// unknown cells by ascending mask and rejecting a partial assignment as soon
// as two committed columns exhibit the (0,1),(1,0),(1,1) configurations;
// committed columns never change, so pruned subtrees contain no solutions.
// Used as the ground truth the reduction is certified against.

#include "ppp/treebuild.hpp"

#include <cstdint>
#include <map>

namespace ppp {

struct ExtendedMatrix {
  std::size_t species = 0;
  std::size_t characters = 0;
  Bitset active;
  std::vector<Bitset> plus_known;   // rows with c+ = 1 for sure
  std::vector<Bitset> minus_known;  // rows with c- = 1 for sure
  std::vector<Bitset> unknown;      // rows whose (c+,c-) pair is open
  std::size_t unknown_count = 0;    // z
};

inline ExtendedMatrix extend(const BinaryMatrix& m) {
  ExtendedMatrix e;
  e.species = m.species_count();
  e.characters = m.character_count();
  e.active = m.active();
  for (std::size_t c = 0; c < m.character_count(); ++c) {
    const Bitset& col = m.column(c);
    if (m.is_active(c)) {
      Bitset all(e.species);
      all.set();
      e.plus_known.push_back(std::move(all));
      e.minus_known.push_back(~col);
      e.unknown.emplace_back(e.species);
    } else {
      e.plus_known.push_back(col);
      e.minus_known.emplace_back(e.species);
      e.unknown.push_back(~col);
      e.unknown_count += e.unknown.back().count();
    }
  }
  return e;
}

// Zero-rooted pairwise compatibility: no two columns may exhibit all three
// configurations (0,1), (1,0), (1,1); equivalently the columns are laminar.
inline bool perfect_phylogeny_test(const std::vector<Bitset>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const Bitset& a = columns[i];
      const Bitset& b = columns[j];
      if ((a & b).any() && (a - b).any() && (b - a).any()) return false;
    }
  return true;
}

inline bool perfect_phylogeny_test(const BinaryMatrix& m) {
  std::vector<Bitset> cols;
  for (std::size_t c = 0; c < m.character_count(); ++c)
    cols.push_back(m.column(c));
  return perfect_phylogeny_test(cols);
}

enum class OracleVerdict { solvable, unsolvable, over_budget };

inline const char* to_string(OracleVerdict v) {
  switch (v) {
    case OracleVerdict::solvable: return "solvable";
    case OracleVerdict::unsolvable: return "unsolvable";
    case OracleVerdict::over_budget: return "over-budget";
  }
  return "?";
}

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::unsolvable;
  std::size_t unknowns = 0;                // z of the instance
  std::optional<BinaryMatrix> completion;  // witness, columns c1+,c1-,...
  std::optional<PersistentTree> tree;      // witness tree over the input
};

namespace detail {

inline BinaryMatrix completion_matrix(const BinaryMatrix& m,
                                      const std::vector<Bitset>& plus,
                                      const std::vector<Bitset>& minus) {
  std::vector<std::string> names;
  std::vector<Bitset> cols;
  for (std::size_t c = 0; c < m.character_count(); ++c) {
    names.push_back(m.character_name(c) + "+");
    cols.push_back(plus[c]);
    names.push_back(m.character_name(c) + "-");
    cols.push_back(minus[c]);
  }
  return BinaryMatrix(m.species_names(), std::move(names), std::move(cols),
                      Bitset(2 * m.character_count()));
}

// Tree of a laminar completion: each distinct nonempty cluster (a c+ column
// of an inactive character, or any c- column) becomes one node under its
// minimal strict superset; species sit at the minimal cluster containing
// them. Gains label an edge before losses.
inline PersistentTree completion_tree(const BinaryMatrix& m,
                                      const std::vector<Bitset>& plus,
                                      const std::vector<Bitset>& minus) {
  std::map<Bitset, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      clusters;  // cluster -> (gained, lost)
  for (std::size_t c = 0; c < m.character_count(); ++c) {
    if (!m.is_active(c) && plus[c].any()) clusters[plus[c]].first.push_back(c);
    if (minus[c].any()) clusters[minus[c]].second.push_back(c);
  }

  using Cluster =
      std::pair<Bitset, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>;
  std::vector<Cluster> order(clusters.begin(), clusters.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.first.count() != b.first.count())
      return a.first.count() > b.first.count();
    return a.first < b.first;
  });

  PersistentTree t;
  t.character_count = m.character_count();
  auto labels = std::make_shared<LabelTable>();
  labels->species = m.species_names();
  labels->characters = m.character_names();
  for (std::size_t c = 0; c < m.character_count(); ++c)
    labels->character_display.push_back(m.display_name(c));
  t.labels = labels;

  TreeNode root;
  root.state = m.active();
  t.nodes.push_back(std::move(root));

  std::vector<std::size_t> node_of(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t parent = 0;
    for (std::size_t j = i; j-- > 0;)
      if (order[i].first.is_proper_subset_of(order[j].first)) {
        parent = node_of[j];  // nearest earlier strict superset is minimal
        break;
      }
    TreeNode v;
    v.parent = parent;
    for (std::size_t c : order[i].second.first)
      v.edge.push_back({c, Sign::gain});
    for (std::size_t c : order[i].second.second)
      v.edge.push_back({c, Sign::loss});
    v.state = t.nodes[parent].state;
    for (const SignedCharacter& sc : v.edge)
      v.state.set(sc.character, sc.sign == Sign::gain);
    std::size_t vid = t.nodes.size();
    t.nodes.push_back(std::move(v));
    t.nodes[parent].children.push_back(vid);
    node_of[i] = vid;
  }

  for (std::size_t s = 0; s < m.species_count(); ++s) {
    std::size_t at = 0;
    for (std::size_t i = order.size(); i-- > 0;)
      if (order[i].first[s]) {
        at = node_of[i];  // last in size-descending order = minimal cluster
        break;
      }
    t.nodes[at].species.push_back(s);
  }
  return t;
}

}  // namespace detail

// Budget caps z, the count of unknown cells; beyond it (or beyond what a
// 64-bit mask enumeration can ever visit) the verdict is over_budget,
// deliberately distinct from unsolvable.
inline OracleResult solve_bruteforce(const BinaryMatrix& m,
                                     std::size_t budget = 20) {
  ExtendedMatrix e = extend(m);
  OracleResult res;
  res.unknowns = e.unknown_count;
  if (res.unknowns > budget || res.unknowns >= 48) {
    res.verdict = OracleVerdict::over_budget;
    return res;
  }

  std::size_t n = m.species_count();
  std::size_t mm = m.character_count();
  std::vector<std::vector<std::size_t>> slots(mm);
  for (std::size_t c = 0; c < mm; ++c)
    for (std::size_t s = e.unknown[c].find_first(); s != Bitset::npos;
         s = e.unknown[c].find_next(s))
      slots[c].push_back(s);

  auto compatible = [](const Bitset& a, const Bitset& b) {
    return !((a & b).any() && (a - b).any() && (b - a).any());
  };

  std::vector<Bitset> committed;
  std::vector<Bitset> plus(mm), minus(mm);
  std::function<bool(std::size_t)> dfs = [&](std::size_t c) -> bool {
    if (c == mm) return true;
    std::size_t k = slots[c].size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      Bitset chosen(n);
      for (std::size_t b = 0; b < k; ++b)
        if (mask >> b & 1) chosen.set(slots[c][b]);
      Bitset p = e.plus_known[c] | chosen;
      Bitset q = e.minus_known[c] | chosen;

      // c+ of active characters is all-ones and c- <= c+ always holds, so
      // the only pairs that can fail involve previously committed columns
      std::vector<const Bitset*> mine;
      if (!m.is_active(c)) mine.push_back(&p);
      if (q.any()) mine.push_back(&q);
      bool ok = true;
      for (const Bitset* col : mine) {
        for (const Bitset& prev : committed)
          if (!compatible(*col, prev)) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      if (!ok) continue;

      std::size_t save = committed.size();
      for (const Bitset* col : mine) committed.push_back(*col);
      plus[c] = std::move(p);
      minus[c] = std::move(q);
      if (dfs(c + 1)) return true;
      committed.resize(save);
    }
    return false;
  };

  if (dfs(0)) {
    res.verdict = OracleVerdict::solvable;
    res.completion = detail::completion_matrix(m, plus, minus);
    res.tree = detail::completion_tree(m, plus, minus);
  } else {
    res.verdict = OracleVerdict::unsolvable;
  }
  return res;
}

}  // namespace ppp
