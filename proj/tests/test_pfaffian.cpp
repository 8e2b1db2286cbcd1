#include <doctest.h>

#include "arbor/pfaffian.hpp"
#include "oracles.hpp"

using namespace arbor;

namespace {

ExactPoly tn(long e) { return ExactPoly::power(Rational(e)); }
const char* kPath4 = "4\n1 2\n2 3\n3 4\n";

bool valid_pairing(const Tree& t, const std::vector<Vertex>& xs, const std::vector<OddPair>& pairs) {
  if (pairs.size() * 2 != xs.size()) return false;
  std::multiset<EdgeId> used;
  std::set<std::size_t> positions;
  for (const OddPair& p : pairs) {
    if (xs[p.pos_i] != p.i || xs[p.pos_j] != p.j) return false;
    if ((p.pos_i + p.pos_j) % 2 != 1) return false;
    positions.insert(p.pos_i);
    positions.insert(p.pos_j);
    for (EdgeId e : t.path_edges(p.i, p.j)) used.insert(e);
  }
  const auto odd = oracle::odd_edges(t, xs);
  return positions.size() == xs.size() && std::vector<EdgeId>(used.begin(), used.end()) == odd;
}

}  // namespace

TEST_SUITE("pfaffian") {

TEST_CASE("skew matrices") {
  const Tree p = Tree::parse(kPath4);
  const PolyMatrix b = build_B(p, std::vector<Vertex>{3, 1});
  CHECK(b(0, 1) == tn(2));
  CHECK(b(1, 0) == -tn(2));
  CHECK(b(0, 0).is_zero());
}

TEST_CASE("closed form examples") {
  CHECK(pf_formula(Tree::parse("2\n1 2\n"), std::vector<Vertex>{1, 2}) == tn(1));
  const Tree p = Tree::parse(kPath4);
  CHECK(pf_formula(p, std::vector<Vertex>{1, 2, 3, 4}) == tn(2));
  CHECK(pf_oracle(p, std::vector<Vertex>{1, 2, 3, 4}) == tn(2));
  const Tree star = Tree::parse("4\n0 1\n0 2\n0 3\n");
  CHECK(pf_formula(star, std::vector<Vertex>{1, 2}) == tn(2));
  CHECK(pf_oracle(star, std::vector<Vertex>{1, 2}) == tn(2));
  CHECK(pf_formula(p, std::vector<Vertex>{}) == ExactPoly(1));
}

TEST_CASE("a crossing order breaks the closed form") {
  const Tree p = Tree::parse(kPath4);
  const std::vector<Vertex> xs{1, 3, 2, 4};
  // b12 b34 - b13 b24 + b14 b23 with b = t^d in the order (1, 3, 2, 4).
  const ExactPoly expected = tn(2) * tn(2) - tn(1) * tn(1) + tn(3) * tn(1);
  CHECK(pf_oracle(p, xs) == expected);
  CHECK(pf_oracle(p, xs) == ExactPoly::monomial(2, 4) - tn(2));
  CHECK(pf_oracle(p, xs) == oracle::matching_pfaffian(build_B(p, xs)));
  CHECK_THROWS_AS(pf_formula(p, xs), NotNicelyOrdered);
  try {
    pf_formula(p, xs);
  } catch (const NotNicelyOrdered& e) {
    CHECK(e.edge() == 1);
  }
}

TEST_CASE("odd size is rejected") {
  const Tree p = Tree::parse(kPath4);
  CHECK_THROWS_WITH(pf_formula(p, std::vector<Vertex>{1, 2, 3}), doctest::Contains("odd size"));
}

TEST_CASE("closed form equals the Pfaffian for every nicely-ordered even X") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Tree t = random_tree(2 + seed % 7, 600 + seed, seed % 2 ? WeightMode::random_rational : WeightMode::unit);
    for (const auto& subset : oracle::subsets(t.vertices())) {
      if (subset.size() % 2) continue;
      const auto xs = nice_order(t, subset);
      const ExactPoly f = pf_formula(t, xs);
      CHECK(f == ExactPoly::power(t.weight(oracle::odd_edges(t, xs))));
      CHECK(f == pf_oracle(t, xs));
      CHECK(f == oracle::matching_pfaffian(build_B(t, xs)));
    }
  }
}

TEST_CASE("any nicely-ordered permutation works, not just the DFS one") {
  const Tree t = random_tree(6, 31, WeightMode::random_rational);
  std::vector<Vertex> xs = t.vertices();
  std::size_t nice = 0;
  do {
    if (!is_nicely_ordered(t, xs)) continue;
    ++nice;
    CHECK(pf_formula(t, xs) == pf_oracle(t, xs));
  } while (std::next_permutation(xs.begin(), xs.end()));
  CHECK(nice >= 12);  // rotations and reversals of the DFS order at least
}

TEST_CASE("pairing examples") {
  const Tree p = Tree::parse(kPath4);
  const auto pairs = odd_pairing(p, std::vector<Vertex>{1, 2, 3, 4});
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].i == 1);
  CHECK(pairs[0].j == 2);
  CHECK(pairs[1].i == 3);
  CHECK(pairs[1].j == 4);
  const auto single = odd_pairing(Tree::parse("2\n1 2\n"), std::vector<Vertex>{1, 2});
  REQUIRE(single.size() == 1);
  CHECK(single[0].pos_i + single[0].pos_j == 1);
}

TEST_CASE("pairings partition the odd edges") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Tree t = random_tree(2 + seed % 9, 700 + seed);
    for (const auto& subset : oracle::subsets(t.vertices())) {
      if (subset.size() % 2) continue;
      const auto xs = nice_order(t, subset);
      CHECK(valid_pairing(t, xs, odd_pairing(t, xs)));
    }
  }
}

}
