#pragma once

#include <initializer_list>
#include <sstream>
#include <string>

#include "ppp/oracle.hpp"
#include "ppp/solve.hpp"

namespace th {

// 6 species, 8 characters, c4 active. Small enough to reason about by hand,
// rich enough to exercise every reduction branch: universal gains, free
// losses, component splits and both regular and degenerate source steps.
inline const char* sample_text() {
  return
      "#active: c4\n"
      "c1 c2 c3 c4 c5 c6 c7 c8\n"
      "s1 0 0 0 1 0 0 0 1\n"
      "s2 0 0 1 1 1 1 0 0\n"
      "s3 0 1 1 0 0 0 0 0\n"
      "s4 1 1 0 0 0 0 0 0\n"
      "s5 1 1 1 0 1 0 1 0\n"
      "s6 0 1 1 1 1 0 0 0\n";
}

inline ppp::BinaryMatrix sample() { return ppp::parse_matrix(sample_text()); }

inline ppp::RBGraph sample_graph() { return ppp::from_matrix(sample()); }

// Smallest matrix with no persistent phylogeny: both characters are active
// and their implied loss columns properly overlap, a permanent conflict.
inline const char* unsolvable_text() {
  return
      "#active: c1 c2\n"
      "c1 c2\n"
      "s1 0 1\n"
      "s2 0 0\n"
      "s3 1 0\n";
}

inline ppp::Bitset bits(std::size_t n, std::initializer_list<std::size_t> idx) {
  ppp::Bitset b(n);
  for (auto i : idx) b.set(i);
  return b;
}

inline ppp::SignedCharacter gain(std::size_t c) {
  return {c, ppp::Sign::gain};
}

inline ppp::SignedCharacter loss(std::size_t c) {
  return {c, ppp::Sign::loss};
}

inline std::string signed_str(const ppp::RBGraph& g,
                              const std::vector<ppp::SignedCharacter>& seq) {
  std::string out;
  for (const auto& sc : seq) {
    if (!out.empty()) out += ' ';
    out += ppp::to_string(g, sc);
  }
  return out;
}

}  // namespace th
