#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace ppp;

TEST_CASE("from_matrix builds black and red edges") {
  RBGraph g = th::sample_graph();
  REQUIRE(g.species_count() == 6);
  REQUIRE(g.character_count() == 8);
  CHECK(g.edge_count() == 19);

  // inactive characters keep their column as black edges
  CHECK_FALSE(g.is_active(0));
  CHECK(g.adjacency(0) == th::bits(6, {3, 4}));
  CHECK(g.adjacency(1) == th::bits(6, {2, 3, 4, 5}));

  // the active character is red-adjacent to the species lacking it
  CHECK(g.is_active(3));
  CHECK(g.adjacency(3) == th::bits(6, {2, 3, 4}));

  CHECK(g.character_name(7) == "c8");
  CHECK(g.species_name(0) == "s1");
  CHECK(g.character_index("c5") == 4);
}

TEST_CASE("from_matrix drops isolated vertices") {
  // s1 holds exactly the active character: no edges in the graph
  BinaryMatrix m = parse_matrix("#active: c1\nc1 c2\n1 0\n0 1\n");
  RBGraph g = from_matrix(m);
  CHECK_FALSE(g.has_species(0));
  CHECK(g.has_species(1));
  CHECK(g.is_active(0));
  CHECK(g.adjacency(0) == th::bits(2, {1}));
  CHECK(g.species_count() == 1);
}

TEST_CASE("components are ordered by smallest species") {
  RBGraph g = th::sample_graph();
  auto comps = g.components();
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].species == th::bits(6, {0}));
  CHECK(comps[0].characters == th::bits(8, {7}));
  CHECK(comps[1].species == th::bits(6, {1, 2, 3, 4, 5}));
  CHECK(comps[1].characters == th::bits(8, {0, 1, 2, 3, 4, 5, 6}));

  CHECK(g.component_species_of(7) == th::bits(6, {0}));
  CHECK(g.component_species_of(2) == th::bits(6, {1, 2, 3, 4, 5}));
}

TEST_CASE("restricted_to keeps indices and labels stable") {
  RBGraph g = th::sample_graph();
  RBGraph big = g.restricted_to(g.components()[1]);
  CHECK(big.species_count() == 5);
  CHECK(big.character_count() == 7);
  CHECK_FALSE(big.has_character(7));
  CHECK(big.adjacency(1) == g.adjacency(1));
  CHECK(big.character_name(4) == "c5");
  CHECK(big.labels_ptr() == g.labels_ptr());
}

TEST_CASE("associated matrix inverts from_matrix") {
  BinaryMatrix m = th::sample();
  CHECK(associated_matrix(from_matrix(m)) == m);

  // after a gain the red edges now mark the zeros of the column
  auto rr = realize_positive(from_matrix(m), 2);
  REQUIRE(rr.status == RealizeStatus::ok);
  BinaryMatrix a = associated_matrix(rr.graph);
  std::size_t c3 = a.character_index("c3");
  CHECK(a.is_active(c3));
  CHECK(a.column(c3) == th::bits(6, {0, 1, 2, 4, 5}));  // everyone but s4
}

TEST_CASE("free and universal characters are component-local") {
  RBGraph g = th::sample_graph();
  CHECK(free_characters(g).empty());
  // c8 spans its whole tiny component, so it is universal before any split
  CHECK(universal_characters(g) == std::vector<std::size_t>{7});

  BinaryMatrix fm = parse_matrix("#active: c1\nc1 c2\n0 1\n0 1\n");
  RBGraph fg = from_matrix(fm);
  CHECK(free_characters(fg) == std::vector<std::size_t>{0});
  CHECK(universal_characters(fg) == std::vector<std::size_t>{1});
}

TEST_CASE("realize_positive rewires the component") {
  RBGraph g = th::sample_graph();
  auto rr = realize_positive(g, 2);
  REQUIRE(rr.status == RealizeStatus::ok);
  CHECK(rr.graph.is_active(2));
  CHECK(rr.graph.adjacency(2) == th::bits(6, {3}));  // red edge to s4 only
  CHECK(rr.graph.species_count() == 6);

  CHECK(realize_positive(g, 3).status == RealizeStatus::not_inactive);
  RBGraph big = g.restricted_to(g.components()[1]);
  CHECK(realize_positive(big, 7).status == RealizeStatus::not_found);
}

TEST_CASE("realize_negative requires a free character") {
  RBGraph g = th::sample_graph();
  CHECK(realize_negative(g, 3).status == RealizeStatus::not_free);
  CHECK(realize_negative(g, 1).status == RealizeStatus::not_active);

  RBGraph fg = from_matrix(parse_matrix("#active: c1\nc1 c2\n0 1\n0 1\n"));
  auto rr = realize_negative(fg, 0);
  REQUIRE(rr.status == RealizeStatus::ok);
  CHECK_FALSE(rr.graph.has_character(0));
  CHECK(rr.graph.species_count() == 2);  // both still hold c2
}

TEST_CASE("signed characters print with display names") {
  RBGraph g = th::sample_graph();
  CHECK(to_string(g, th::gain(2)) == "c3+");
  CHECK(to_string(g, th::loss(3)) == "c4-");
  CHECK(to_string(g, CReduction{th::gain(0), th::loss(4)}) == "c1+ c5-");
}

TEST_CASE("red sigma detection") {
  CHECK_FALSE(has_red_sigma(th::sample_graph()));
  // two active characters whose red neighborhoods properly overlap
  RBGraph bad = from_matrix(parse_matrix(th::unsolvable_text()));
  CHECK(has_red_sigma(bad));
}

TEST_CASE("apply_creduction flushes forced losses") {
  RBGraph g = th::sample_graph();
  std::vector<std::pair<SignedCharacter, RBGraph>> snap;
  ApplyResult res = apply_creduction(
      g, CReduction{th::gain(2), th::gain(4), th::gain(1)},
      [&](const RBGraph& h, const SignedCharacter& sc) { snap.emplace_back(sc, h); });

  REQUIRE(res.status == RealizeStatus::ok);
  CHECK(th::signed_str(g, res.extended) == "c3+ c5+ c2+ c4-");
  REQUIRE(snap.size() == 4);

  // c3 gain leaves a single red edge to s4
  CHECK(snap[0].second.adjacency(2) == th::bits(6, {3}));
  // c5 gain reddens s3,s4 and splits {s2,c6} off
  CHECK(snap[1].second.adjacency(4) == th::bits(6, {2, 3}));
  // c2 gain has an empty red set: the character vanishes, s6 with it
  CHECK_FALSE(snap[2].second.has_character(1));
  CHECK_FALSE(snap[2].second.has_species(5));
  // which leaves c4 red-adjacent to its entire component: the forced loss
  CHECK(snap[2].second.adjacency(3) == th::bits(6, {2, 3, 4}));
  CHECK(snap[3].first.character == 3);
  CHECK(snap[3].first.sign == Sign::loss);
  CHECK_FALSE(res.graph.has_character(3));
}

TEST_CASE("apply_creduction on an empty reduction is the identity") {
  RBGraph fg = from_matrix(parse_matrix("#active: c1\nc1 c2\n0 1\n0 1\n"));
  ApplyResult res = apply_creduction(fg, {});
  CHECK(res.status == RealizeStatus::ok);
  CHECK(res.extended.empty());
  CHECK(res.graph == fg);  // free loss not flushed without a gain to make
}

TEST_CASE("apply_creduction rejects bad moves") {
  RBGraph g = th::sample_graph();
  ApplyResult neg = apply_creduction(g, CReduction{th::loss(3)});
  CHECK(neg.status == RealizeStatus::not_inactive);
  CHECK(neg.failed_index == 0);

  ApplyResult act = apply_creduction(g, CReduction{th::gain(2), th::gain(3)});
  CHECK(act.status == RealizeStatus::not_inactive);
  CHECK(act.failed_index == 1);
  CHECK(th::signed_str(g, act.extended) == "c3+");
}

TEST_CASE("graph dot rendering names every vertex") {
  std::string dot = to_dot(th::sample_graph());
  CHECK(dot.find("digraph") == std::string::npos);
  CHECK(dot.find("graph redblack {") != std::string::npos);
  CHECK(dot.find("\"s1\"") != std::string::npos);
  CHECK(dot.find("\"c4\"") != std::string::npos);
  CHECK(dot.find("color=red") != std::string::npos);
}
