#include <doctest.h>

#include "arbor/minors.hpp"
#include "oracles.hpp"

using namespace arbor;

namespace {

ExactPoly tn(long e) { return ExactPoly::power(Rational(e)); }
const char* kStar0 = "4\n0 1\n0 2\n0 3\n";
const char* kPath3 = "3\n1 2\n2 3\n";

}  // namespace

TEST_SUITE("minors") {

TEST_CASE("distance matrices") {
  const Tree p = Tree::parse("2\n1 2\n");
  const PolyMatrix a = build_A(p, std::vector<Vertex>{1, 2});
  CHECK(a(0, 0) == ExactPoly(1));
  CHECK(a(0, 1) == tn(1));
  CHECK(build_A(p, std::vector<Vertex>{2}).size() == 1);
  const Tree star = Tree::parse(kStar0);
  const PolyMatrix s = build_A(star, std::vector<Vertex>{1, 2, 3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(s(i, j) == (i == j ? ExactPoly(1) : tn(2)));
}

TEST_CASE("spanned forests on small cases") {
  const Tree p = Tree::parse(kPath3);
  const auto fs = spanned_forests(p, std::vector<Vertex>{1, 3});
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].edges.empty());
  CHECK(fs[0].isolated == VertexSet{1, 3});
  CHECK(fs[0].components == 2);
  CHECK(fs[1].edges.size() == 2);
  CHECK(fs[1].components == 1);
  CHECK(fs[1].degree(p, 2) == 2);
  const auto one = spanned_forests(p, std::vector<Vertex>{2});
  REQUIRE(one.size() == 1);
  CHECK(one[0].isolated == VertexSet{2});
  const Tree t = random_tree(6, 9);
  CHECK(spanned_forests(t, t.vertices()).size() == 32);
}

TEST_CASE("spanned forest counts match the definition") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Tree t = random_tree(2 + seed % 7, 300 + seed);
    for (const auto& xs : oracle::subsets(t.vertices())) {
      const std::size_t expected = oracle::count_spanned_forests(t, xs);
      CHECK(spanned_forests(t, xs).size() == expected);
      CHECK(spanned_forests(t, xs, ForestUniverse::all_edges).size() == expected);
    }
  }
}

TEST_CASE("minor formula examples") {
  const Tree p = Tree::parse(kPath3);
  CHECK(minor_formula(p, std::vector<Vertex>{1, 3}) == ExactPoly(1) - tn(4));
  CHECK(minor_formula(p, p.vertices()) == (ExactPoly(1) - tn(2)).pow(2));
  CHECK(minor_formula(Tree::parse("2\n1 2\n"), std::vector<Vertex>{1, 2}) == ExactPoly(1) - tn(2));
  const Tree star = Tree::parse(kStar0);
  const ExactPoly expected = ExactPoly(1) - ExactPoly::monomial(3, 4) + ExactPoly::monomial(2, 6);
  CHECK(minor_formula(star, std::vector<Vertex>{1, 2, 3}) == expected);
  CHECK(minor_oracle(star, std::vector<Vertex>{1, 2, 3}) == expected);
  CHECK(minor_leading(star, std::vector<Vertex>{1, 2, 3}) == Term{6, 2});
  CHECK(minor_leading(p, std::vector<Vertex>{2}) == Term{0, 1});
  CHECK(minor_leading(p, std::vector<Vertex>{1, 3}) == Term{4, -1});
}

TEST_CASE("unit trees give (1 - t^2)^(N-1) on all of V") {
  for (std::size_t n = 1; n <= 9; ++n) {
    for (const Tree& t : oracle::unlabeled_trees(n)) {
      CHECK(minor_formula(t, t.vertices()) == (ExactPoly(1) - tn(2)).pow(static_cast<unsigned>(n - 1)));
    }
  }
}

TEST_CASE("formula, both universes, jobs and the pointwise determinant agree") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Tree t = random_tree(2 + seed % 5, 400 + seed, seed % 2 ? WeightMode::random_rational : WeightMode::unit);
    for (const auto& xs : oracle::subsets(t.vertices())) {
      const ExactPoly f = minor_formula(t, xs);
      CHECK(f == minor_formula(t, xs, {ForestUniverse::all_edges, 1}));
      CHECK(f == minor_formula(t, xs, {ForestUniverse::spanned_subtree, 3}));
      CHECK(f == minor_oracle(t, xs, DetMethod::expansion));
      if (t.unit_weights()) CHECK(oracle::det_matches(build_A(t, xs), f));
      CHECK(minor_leading(t, xs) == f.leading_term());
    }
  }
}

TEST_CASE("the formula does not depend on the order of X") {
  const Tree t = random_tree(7, 77, WeightMode::random_rational);
  std::vector<Vertex> xs{5, 2, 7, 1};
  const ExactPoly f = minor_formula(t, xs);
  std::sort(xs.begin(), xs.end());
  do {
    CHECK(minor_formula(t, xs) == f);
  } while (std::next_permutation(xs.begin(), xs.end()));
}

TEST_CASE("signatures") {
  const Tree p = Tree::parse("2\n1 2\n");
  const Signature one = signature(p, std::vector<Vertex>{2});
  CHECK(one.positives == 1);
  CHECK(one.negatives == 0);
  const Signature two = signature(p, std::vector<Vertex>{1, 2});
  CHECK(two.positives == 1);
  CHECK(two.negatives == 1);
  REQUIRE(two.evidence.size() == 2);
  CHECK(two.evidence[1] == Term{2, -1});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Tree t = random_tree(7, 500 + seed, WeightMode::random_rational);
    for (const auto& xs : oracle::subsets(t.vertices())) {
      const Signature s = signature(t, xs);
      CHECK(s.positives == 1);
      CHECK(s.negatives == xs.size() - 1);
    }
  }
}

TEST_CASE("weighted minors") {
  const Tree p = Tree::parse("2\n1 2\n");
  const std::vector<Rational> pot{1, 2};
  CHECK(weighted_minor(p, std::vector<Vertex>{1, 2}, pot) == tn(6) - tn(8));
  CHECK(weighted_minor(p, std::vector<Vertex>{1, 1}, pot).is_zero());
  CHECK_THROWS(weighted_minor(p, std::vector<Vertex>{1, 3}, pot));
  const Tree t = random_tree(6, 12, WeightMode::random_rational);
  const std::vector<Vertex> phi{2, 5, 6};
  const std::vector<Rational> zero(3, Rational(0));
  CHECK(weighted_minor(t, phi, zero) == minor_formula(t, phi));
  // A potential scales row and column i by t^(p_i).
  const std::vector<Rational> q{Rational(1, 2), Rational(-1), Rational(3)};
  CHECK(weighted_minor(t, phi, q) == minor_formula(t, phi) * ExactPoly::power(5));
}

}
