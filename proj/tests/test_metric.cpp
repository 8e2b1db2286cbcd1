#include <doctest.h>

#include "arbor/metric.hpp"
#include "arbor/minors.hpp"
#include "oracles.hpp"

using namespace arbor;

namespace {

SymMatrixQ from_rows(const std::vector<std::vector<long>>& rows) {
  SymMatrixQ m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i; j < rows.size(); ++j) m.set(i, j, ExtRational(rows[i][j]));
  return m;
}

const SymMatrixQ kC4 = from_rows({{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}});

RationalMatrix identity(std::size_t n) {
  RationalMatrix m{n, std::vector<Rational>(n * n)};
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

}  // namespace

TEST_SUITE("metric") {

TEST_CASE("CSV parsing") {
  const SymMatrixQ m = SymMatrixQ::parse_csv("# comment\n0, 1/2, -inf\n1/2 0 3\n-inf;3;0\n");
  CHECK(m.size() == 3);
  CHECK(m(0, 1) == ExtRational(Rational(1, 2)));
  CHECK(m(2, 0).is_neg_inf());
  CHECK_FALSE(m.all_finite());
  CHECK(SymMatrixQ::parse_csv(m.to_csv()) == m);
  CHECK_THROWS_WITH(SymMatrixQ::parse_csv("0,1\n2,0\n"), doctest::Contains("not symmetric"));
  CHECK_THROWS_WITH_AS(SymMatrixQ::parse_csv("0,1\n1,x\n"), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(SymMatrixQ::parse_csv("0,1,2\n1,0\n"), ParseError);
}

TEST_CASE("four-point condition") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Tree t = random_tree(1 + seed % 10, 1100 + seed, WeightMode::random_rational);
    const SymMatrixQ d = distance_matrix(t);
    CHECK_FALSE(check_4pc(d).has_value());
    CHECK(oracle::satisfies_4pc(d));
  }
  const auto q = check_4pc(kC4);
  REQUIRE(q.has_value());
  CHECK(*q == Quadruple{1, 3, 2, 4});
  CHECK_FALSE(check_4pc(SymMatrixQ(1)).has_value());
  CHECK(check_4pc(kC4, 3) == q);
}

TEST_CASE("repeated indices give the diagonal conditions") {
  // w11 + w22 <= 2 w12 fails.
  const SymMatrixQ w = from_rows({{2, 0}, {0, 2}});
  const auto q = check_4pc(w);
  REQUIRE(q.has_value());
  CHECK((*q)[0] == 1);
  // -inf off the diagonal forces -inf on it.
  SymMatrixQ v(2);
  v.set(0, 1, ExtRational::neg_inf());
  CHECK(check_4pc(v).has_value());
  v.set(0, 0, ExtRational::neg_inf());
  v.set(1, 1, ExtRational::neg_inf());
  CHECK_FALSE(check_4pc(v).has_value());
}

TEST_CASE("4PC checker agrees with the brute-force oracle") {
  std::mt19937_64 rng(12);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 1 + rng() % 5;
    SymMatrixQ w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) w.set(i, j, rng() % 10 == 0 ? ExtRational::neg_inf() : ExtRational(static_cast<long>(rng() % 5)));
    CHECK(check_4pc(w).has_value() != oracle::satisfies_4pc(w));
  }
}

TEST_CASE("decomposition") {
  const Tree p = Tree::parse("2\n1 2\n");
  const SymMatrixQ w = from_rows({{2, 4}, {4, 4}});
  const TreeMetricDecomposition dec = decompose(w);
  CHECK(dec.p == std::vector<Rational>{1, 2});
  CHECK(dec.d == distance_matrix(p));
  CHECK(recompose(dec.d, dec.p) == w);
  const SymMatrixQ d = distance_matrix(random_tree(6, 4));
  const TreeMetricDecomposition plain = decompose(d);
  CHECK(plain.p == std::vector<Rational>(6, Rational(0)));
  CHECK(plain.d == d);
  CHECK_THROWS_AS(decompose(kC4), FourPointViolation);
}

TEST_CASE("realization") {
  const SymMatrixQ star = from_rows({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
  const Realization r = realize_tree(star);
  CHECK(r.tree.vertex_count() == 4);
  CHECK(r.tree.unit_weights());
  CHECK(distance_matrix(r.tree, r.phi) == star);
  const Realization edge = realize_tree(from_rows({{0, 5}, {5, 0}}));
  CHECK(edge.tree.edge_count() == 1);
  CHECK(edge.tree.edge(0).weight == 5);
  const Realization same = realize_tree(from_rows({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}}));
  CHECK(same.phi[0] == same.phi[1]);
  CHECK_THROWS_AS(realize_tree(kC4), FourPointViolation);
}

TEST_CASE("realization reproduces random tree metrics") {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Tree t = random_tree(1 + seed % 10, 1200 + seed, WeightMode::random_rational);
    std::vector<Vertex> phi;
    for (std::size_t a = 0, m = 1 + rng() % 8; a < m; ++a) phi.push_back(static_cast<Vertex>(1 + rng() % t.vertex_count()));
    const SymMatrixQ d = distance_matrix(t, phi);
    const Realization r = realize_tree(d);
    CHECK(distance_matrix(r.tree, r.phi) == d);
    CHECK(r.tree.vertex_count() <= 2 * phi.size());
  }
}

TEST_CASE("tau matrices") {
  const SymMatrixQ w = SymMatrixQ::parse_csv("0,1/2\n1/2,-inf\n");
  const RationalMatrix m = tau_matrix(w, 3);
  // tau stands for t^(1/2): t^(1/2) -> 3.
  CHECK(m(0, 0) == 1);
  CHECK(m(0, 1) == 3);
  CHECK(m(1, 1) == 0);
  CHECK_THROWS(tau_matrix(w, 0));
  const std::vector<std::size_t> rows{0, 1};
  CHECK(det_exact(m, rows) == -9);
}

TEST_CASE("star condition") {
  const Tree t = random_tree(6, 8, WeightMode::random_rational);
  const std::vector<Rational> pot{1, Rational(-1, 2), 0, 3, 2, Rational(1, 3)};
  const SymMatrixQ w = recompose(distance_matrix(t), pot);
  CHECK(star_condition_check(tau_matrix(w, 10)).ok);
  const StarConditionResult id = star_condition_check(identity(3));
  CHECK_FALSE(id.ok);
  CHECK(id.violation.size() == 2);
  CHECK(id.det == 1);
  RationalMatrix one{1, {Rational(5)}};
  CHECK(star_condition_check(one).ok);
  const StarConditionResult c4 = star_condition_check(tau_matrix(kC4, 10));
  CHECK_FALSE(c4.ok);
}

TEST_CASE("4PC and the sign pattern agree on random matrices") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 4;
    SymMatrixQ w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) w.set(i, j, ExtRational(Rational(static_cast<long>(rng() % 9) - 4, 1 + rng() % 2)));
    CHECK(check_4pc(w).has_value() != star_condition_check(tau_matrix(w, 100)).ok);
  }
}

TEST_CASE("diagonal and mixed inequalities on 4PC matrices") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Tree t = random_tree(5, 1300 + seed, WeightMode::random_rational);
    std::vector<Rational> pot;
    for (int a = 0; a < 5; ++a) pot.push_back(Rational(static_cast<long>(rng() % 9) - 4, 2));
    const SymMatrixQ w = recompose(distance_matrix(t), pot);
    REQUIRE_FALSE(check_4pc(w).has_value());
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 0; k < 5; ++k) {
        CHECK(w(i, i) + w(k, k) <= w(i, k) + w(i, k));
        for (std::size_t l = 0; l < 5; ++l) CHECK(w(i, i) + w(k, l) <= w(i, k) + w(i, l));
      }
  }
}

TEST_CASE("inertia") {
  CHECK(inertia_numeric(identity(3)) == Inertia{3, 0, 0});
  CHECK(inertia_numeric(RationalMatrix{3, std::vector<Rational>(9)}) == Inertia{0, 0, 3});
  // Zero diagonal needs off-diagonal pivots.
  CHECK(inertia_numeric(RationalMatrix{2, {0, 1, 1, 0}}) == Inertia{1, 1, 0});
  CHECK(inertia_numeric(2, {0.0, 1.0, 1.0, 0.0}) == Inertia{1, 1, 0});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Tree t = random_tree(7, 1400 + seed, WeightMode::random_rational);
    const RationalMatrix m = tau_matrix(distance_matrix(t), 10);
    CHECK(inertia_numeric(m) == Inertia{1, 6, 0});
  }
}

TEST_CASE("half-plane check") {
  const std::vector<Rational> taus{10, 100, 1000};
  const HppCheck path = hpp_eigen_check(distance_matrix(Tree::parse("4\n1 2\n2 3\n3 4\n")), taus);
  CHECK(path.ok);
  CHECK(path.per_tau.size() == 3);
  const HppCheck c4 = hpp_eigen_check(kC4, taus);
  CHECK_FALSE(c4.ok);
  CHECK_FALSE(c4.four_point);
  CHECK(c4.certificate.has_value());
  REQUIRE(c4.counterexample_tau.has_value());
  CHECK(c4.per_tau[0].second.positives > 1);
  CHECK(hpp_eigen_check(SymMatrixQ(1), taus).ok);
}

}
