#pragma once

// Species/character 0/1 matrices with an optional set of active characters.
// Text format, one matrix per stream:
//
//   #active: c4,c7          (optional; names must refer to columns)
//   c1 c2 c3                (optional header of character names)
//   s1 0 1 0                (one row per species; name column optional)
//
// Unnamed rows/columns are auto-named s1..sn / c1..cm unless strict naming
// is requested.

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppp {

using Bitset = boost::dynamic_bitset<>;

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_),
        line(line_) {}
};

struct LookupError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class BinaryMatrix {
 public:
  BinaryMatrix() = default;

  BinaryMatrix(std::vector<std::string> species_names,
               std::vector<std::string> character_names,
               std::vector<Bitset> columns, Bitset active)
      : species_names_(std::move(species_names)),
        character_names_(std::move(character_names)),
        columns_(std::move(columns)),
        active_(std::move(active)),
        aliases_(character_names_.size()) {
    if (columns_.size() != character_names_.size())
      throw std::invalid_argument("column count does not match names");
    for (const Bitset& col : columns_)
      if (col.size() != species_names_.size())
        throw std::invalid_argument("column height does not match row count");
    if (active_.size() != columns_.size())
      throw std::invalid_argument("active set size does not match columns");
  }

  std::size_t species_count() const { return species_names_.size(); }
  std::size_t character_count() const { return character_names_.size(); }
  bool empty() const { return species_count() == 0 || character_count() == 0; }

  bool value(std::size_t s, std::size_t c) const { return columns_[c][s]; }
  const Bitset& column(std::size_t c) const { return columns_[c]; }

  // Row as a character set (bit c set iff M[s,c] = 1).
  Bitset row(std::size_t s) const {
    Bitset r(character_count());
    for (std::size_t c = 0; c < character_count(); ++c)
      if (columns_[c][s]) r.set(c);
    return r;
  }

  const Bitset& active() const { return active_; }
  bool is_active(std::size_t c) const { return active_[c]; }

  const std::vector<std::string>& species_names() const { return species_names_; }
  const std::vector<std::string>& character_names() const { return character_names_; }
  const std::string& species_name(std::size_t s) const { return species_names_[s]; }
  const std::string& character_name(std::size_t c) const { return character_names_[c]; }

  // Names an output label should carry: primary name plus any column names
  // merged into this one during preprocessing.
  std::string display_name(std::size_t c) const {
    std::string out = character_names_[c];
    for (const std::string& a : aliases_[c]) out += "|" + a;
    return out;
  }
  const std::vector<std::string>& aliases(std::size_t c) const { return aliases_[c]; }
  void add_alias(std::size_t c, std::string name) {
    aliases_[c].push_back(std::move(name));
  }

  std::size_t character_index(const std::string& name) const {
    for (std::size_t c = 0; c < character_names_.size(); ++c)
      if (character_names_[c] == name) return c;
    throw LookupError("unknown character: " + name);
  }
  std::size_t species_index(const std::string& name) const {
    for (std::size_t s = 0; s < species_names_.size(); ++s)
      if (species_names_[s] == name) return s;
    throw LookupError("unknown species: " + name);
  }

  bool operator==(const BinaryMatrix& o) const {
    return species_names_ == o.species_names_ &&
           character_names_ == o.character_names_ && columns_ == o.columns_ &&
           active_ == o.active_;
  }

 private:
  std::vector<std::string> species_names_;
  std::vector<std::string> character_names_;
  std::vector<Bitset> columns_;  // one bitset of species per character
  Bitset active_;
  std::vector<std::vector<std::string>> aliases_;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool is_cell(const std::string& tok) { return tok == "0" || tok == "1"; }

inline void check_duplicates(const std::vector<std::string>& names,
                             const char* what, int line) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    throw ParseError(line, std::string("duplicate ") + what + " name: " + *dup);
}

}  // namespace detail

inline BinaryMatrix parse_matrix(std::istream& in, bool strict_names = false) {
  std::string line;
  int lineno = 0;
  std::optional<std::string> active_directive;
  int active_line = 0;
  std::vector<std::string> character_names;
  bool header_seen = false;
  std::vector<std::string> species_names;
  std::vector<std::vector<bool>> rows;
  bool named_rows = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      const std::string directive = "#active:";
      if (line.rfind(directive, 0) != 0)
        throw ParseError(lineno, "unrecognized directive (only #active: is allowed)");
      if (active_directive)
        throw ParseError(lineno, "repeated #active: directive");
      if (!rows.empty() || header_seen)
        throw ParseError(lineno, "#active: must precede the matrix");
      active_directive = line.substr(directive.size());
      active_line = lineno;
      continue;
    }

    std::vector<std::string> toks = detail::split_ws(line);
    bool all_cells = std::all_of(toks.begin(), toks.end(), detail::is_cell);
    bool tail_cells = toks.size() > 1 &&
                      std::all_of(toks.begin() + 1, toks.end(), detail::is_cell);

    if (!header_seen && rows.empty() && !all_cells && !tail_cells) {
      // A line with no 0/1 cells at all is the character-name header.
      detail::check_duplicates(toks, "character", lineno);
      character_names = toks;
      header_seen = true;
      continue;
    }

    std::string name;
    std::vector<std::string> cells;
    if (all_cells) {
      cells = toks;
    } else if (tail_cells) {
      name = toks[0];
      cells = {toks.begin() + 1, toks.end()};
    } else {
      throw ParseError(lineno, "malformed row: expected <name> <0/1 ...> or <0/1 ...>");
    }

    if (rows.empty()) {
      named_rows = !name.empty();
    } else {
      if (named_rows == name.empty())
        throw ParseError(lineno, "rows must be uniformly named or unnamed");
      if (cells.size() != rows.front().size())
        throw ParseError(lineno, "row width differs from previous rows");
    }
    if (named_rows) species_names.push_back(name);
    std::vector<bool> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) row.push_back(cell == "1");
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw ParseError(lineno, "no rows");
  std::size_t m = rows.front().size();
  if (header_seen && character_names.size() != m)
    throw ParseError(lineno, "header names a different number of characters than rows have");
  if (strict_names && (!header_seen || !named_rows))
    throw ParseError(lineno, "strict naming requires a header and named rows");

  if (!header_seen) {
    for (std::size_t c = 0; c < m; ++c)
      character_names.push_back("c" + std::to_string(c + 1));
  }
  if (!named_rows) {
    for (std::size_t s = 0; s < rows.size(); ++s)
      species_names.push_back("s" + std::to_string(s + 1));
  } else {
    detail::check_duplicates(species_names, "species", lineno);
  }

  std::vector<Bitset> columns(m, Bitset(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t c = 0; c < m; ++c)
      if (rows[s][c]) columns[c].set(s);

  Bitset active(m);
  if (active_directive) {
    std::string spec = *active_directive;
    std::replace(spec.begin(), spec.end(), ',', ' ');
    for (const std::string& name : detail::split_ws(spec)) {
      auto it = std::find(character_names.begin(), character_names.end(), name);
      if (it == character_names.end())
        throw ParseError(active_line, "unknown active character: " + name);
      active.set(static_cast<std::size_t>(it - character_names.begin()));
    }
  }

  return BinaryMatrix(std::move(species_names), std::move(character_names),
                      std::move(columns), std::move(active));
}

inline BinaryMatrix parse_matrix(const std::string& text, bool strict_names = false) {
  std::istringstream in(text);
  return parse_matrix(in, strict_names);
}

inline std::string serialize_matrix(const BinaryMatrix& m) {
  std::string out;
  if (m.active().any()) {
    out += "#active: ";
    bool first = true;
    for (std::size_t c = 0; c < m.character_count(); ++c)
      if (m.is_active(c)) {
        if (!first) out += ",";
        out += m.character_name(c);
        first = false;
      }
    out += "\n";
  }
  for (std::size_t c = 0; c < m.character_count(); ++c) {
    if (c) out += " ";
    out += m.character_name(c);
  }
  out += "\n";
  for (std::size_t s = 0; s < m.species_count(); ++s) {
    out += m.species_name(s);
    for (std::size_t c = 0; c < m.character_count(); ++c)
      out += m.value(s, c) ? " 1" : " 0";
    out += "\n";
  }
  return out;
}

struct PreprocessReport {
  std::vector<std::string> removed_null_species;
  std::vector<std::string> removed_null_characters;
  // (kept, dropped) name pairs for merged duplicate columns.
  std::vector<std::pair<std::string, std::string>> merged_duplicate_columns;

  bool no_change() const {
    return removed_null_species.empty() && removed_null_characters.empty() &&
           merged_duplicate_columns.empty();
  }
};

// Removes species and characters that would be isolated vertices of the
// red-black graph and merges duplicate columns (same cells, same active
// status; first occurrence kept and given the dropped name as an alias).
//
// Isolated species: row equal to 1-on-active (for an empty active set, the
// all-zero row). Isolated characters: inactive all-zero column, active
// all-ones column. An active all-zero column is also removed: it is
// red-adjacent to every species, must be lost before anything else, and
// dropping it never changes solvability.
inline std::pair<BinaryMatrix, PreprocessReport> preprocess(const BinaryMatrix& m) {
  PreprocessReport report;
  std::size_t n = m.species_count();
  std::size_t mm = m.character_count();

  std::vector<std::size_t> keep_cols;
  for (std::size_t c = 0; c < mm; ++c) {
    const Bitset& col = m.column(c);
    bool null_col = m.is_active(c) ? (col.all() || col.none()) : col.none();
    if (null_col) {
      report.removed_null_characters.push_back(m.character_name(c));
      continue;
    }
    bool dup = false;
    for (std::size_t kept : keep_cols)
      if (m.column(kept) == col && m.is_active(kept) == m.is_active(c)) {
        report.merged_duplicate_columns.emplace_back(m.character_name(kept),
                                                     m.character_name(c));
        dup = true;
        break;
      }
    if (!dup) keep_cols.push_back(c);
  }

  std::vector<std::size_t> keep_rows;
  for (std::size_t s = 0; s < n; ++s) {
    bool isolated = true;
    for (std::size_t c : keep_cols)
      if (m.value(s, c) != m.is_active(c)) {
        isolated = false;
        break;
      }
    if (isolated)
      report.removed_null_species.push_back(m.species_name(s));
    else
      keep_rows.push_back(s);
  }

  std::vector<std::string> species_names;
  for (std::size_t s : keep_rows) species_names.push_back(m.species_name(s));
  std::vector<std::string> character_names;
  std::vector<Bitset> columns;
  Bitset active(keep_cols.size());
  for (std::size_t i = 0; i < keep_cols.size(); ++i) {
    std::size_t c = keep_cols[i];
    character_names.push_back(m.character_name(c));
    Bitset col(keep_rows.size());
    for (std::size_t j = 0; j < keep_rows.size(); ++j)
      if (m.value(keep_rows[j], c)) col.set(j);
    columns.push_back(std::move(col));
    if (m.is_active(c)) active.set(i);
  }

  BinaryMatrix out(std::move(species_names), std::move(character_names),
                   std::move(columns), std::move(active));
  for (std::size_t i = 0; i < keep_cols.size(); ++i)
    for (const std::string& a : m.aliases(keep_cols[i])) out.add_alias(i, a);
  for (std::size_t i = 0; i < out.character_count(); ++i)
    for (const auto& [kept, dropped] : report.merged_duplicate_columns)
      if (out.character_name(i) == kept) out.add_alias(i, dropped);
  return {std::move(out), std::move(report)};
}

// Species possessing character c (the column as a species set).
inline Bitset species_of(const BinaryMatrix& m, std::size_t c) {
  if (c >= m.character_count()) throw LookupError("character index out of range");
  return m.column(c);
}

// True iff the two columns exhibit all four configurations
// (0,0), (0,1), (1,0), (1,1) across the species rows.
inline bool conflicting(const BinaryMatrix& m, std::size_t c1, std::size_t c2) {
  if (c1 >= m.character_count() || c2 >= m.character_count())
    throw LookupError("character index out of range");
  const Bitset& a = m.column(c1);
  const Bitset& b = m.column(c2);
  return (a & b).any() && (a - b).any() && (b - a).any() &&
         (~a & ~b).any();
}

}  // namespace ppp
