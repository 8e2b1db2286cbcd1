#include <doctest.h>

#include "arbor/tropic.hpp"
#include "oracles.hpp"

using namespace arbor;

namespace {

Series ts(long e) { return Series::monomial(1, e); }

// Generalized binomial coefficient C(a, k).
Rational binom(const Rational& a, long k) {
  Rational r = 1;
  for (long i = 0; i < k; ++i) r = r * (a - i) / (i + 1);
  return r;
}

SeriesMatrix square(std::initializer_list<std::initializer_list<Series>> rows) {
  SeriesMatrix m;
  for (const auto& r : rows) m.emplace_back(r);
  return m;
}

// Q^T Q - m has no known nonzero term.
bool reproduces(const SeriesMatrix& q, const SeriesMatrix& m) {
  const SeriesMatrix p = multiply(transpose(q), q);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (!(p[i][j] - m[i][j]).is_zero()) return false;
  return true;
}

}  // namespace

TEST_SUITE("tropic") {

TEST_CASE("exact arithmetic") {
  CHECK((ts(1) + Series(1)) * (ts(1) - Series(1)) == ts(2) - Series(1));
  CHECK((ts(1) + 1 - (ts(1) + 1)).is_zero());
  CHECK((ts(1) - ts(1)).is_exact());
  CHECK(Series(ExactPoly::power(Rational(1, 2))).ramification() == 2);
  CHECK(Series(3).to_string() == "3");
}

TEST_CASE("precision bookkeeping") {
  const Series a = Series(1) + Series::unknown_below(-2);  // 1 + O(t^-2)
  const Series b = ts(1) + Series::unknown_below(-1);       // t + O(t^-1)
  const Series p = a * b;
  REQUIRE(p.precision().has_value());
  CHECK(*p.precision() == -1);
  CHECK(p.terms().size() == 1);
  CHECK(p.coefficient(1) == 1);
  CHECK(p.to_string() == "t + O(t^(-1))");
  CHECK_FALSE((a + ts(-5)).terms().count(Rational(-5)));  // below the precision: absorbed
  CHECK(ts(1).truncated(0).to_string() == "t + O(1)");
}

TEST_CASE("division matches the geometric series") {
  const Rational window = 12;
  const Series q = divide(ts(1), ts(1) + 1, window);
  REQUIRE(q.precision().has_value());
  CHECK(*q.precision() <= -10);
  for (long k = 0; Rational(-k) > *q.precision(); ++k) CHECK(q.coefficient(-k) == (k % 2 ? -1 : 1));
  CHECK(series_arith(ts(1), ts(1) + 1, SeriesOp::div, window) == q);
  CHECK_THROWS_AS(inverse(Series(), window), std::domain_error);
}

TEST_CASE("inverse of an inexact series keeps its relative precision") {
  const Series x = ts(1) + Series::unknown_below(-1);
  const Series inv = inverse(x, 50);
  REQUIRE(inv.precision().has_value());
  CHECK(*inv.precision() == -3);
  CHECK(inv.coefficient(-1) == 1);
}

TEST_CASE("square roots") {
  CHECK(series_sqrt(Series::monomial(4, 2), 10) == Series::monomial(2, 1));
  CHECK(series_sqrt(Series(1), 10) == Series(1));
  const Series r = series_sqrt(ts(2) + ts(1), 8);
  REQUIRE(r.precision().has_value());
  for (long k = 0; Rational(1 - k) > *r.precision(); ++k) CHECK(r.coefficient(1 - k) == binom(Rational(1, 2), k));
  CHECK(r.coefficient(0) == Rational(1, 2));
  CHECK(r.coefficient(-1) == Rational(-1, 8));
  CHECK_THROWS_AS(series_sqrt(Series(-4), 4), std::domain_error);
  CHECK_THROWS_AS(series_sqrt(Series(2), 4), std::domain_error);
}

TEST_CASE("ordering") {
  CHECK(compare(ts(1), Series(1000)) == 1);
  CHECK(compare(ts(-1), Series()) == 1);
  CHECK(compare(Series(1) + ts(-1), Series(1)) == 1);
  CHECK(compare(Series(2), Series(2)) == 0);
  CHECK(compare(-ts(3), ts(2)) == -1);
  CHECK_THROWS_AS(compare(Series(1) + Series::unknown_below(0), Series(1)), PrecisionError);
}

TEST_CASE("valuations") {
  CHECK(valuation(ts(3) + Series::monomial(2, 1)) == ExtRational(3));
  CHECK(valuation(Series()).is_neg_inf());
  CHECK(valuation(Series(5)) == ExtRational(0));
  CHECK(valuation(ExactPoly()).is_neg_inf());
  CHECK(valuation(ExactPoly::power(Rational(-7, 2))) == ExtRational(Rational(-7, 2)));
  CHECK_THROWS_AS(valuation(Series::unknown_below(3)), PrecisionError);
  CHECK_THROWS_WITH(valuation(Series::unknown_below(3)), doctest::Contains("--window"));
}

TEST_CASE("substitution") {
  const Series s = ts(2) + Series::unknown_below(0);
  const Series h = s.substitute_power(Rational(1, 2));
  CHECK(h.coefficient(1) == 1);
  CHECK(*h.precision() == 0);
  CHECK_THROWS(s.substitute_power(-1));
}

TEST_CASE("small determinants agree with the polynomial determinant") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    const std::size_t n = 1 + rng() % 4;
    std::vector<ExactPoly> e(n * n);
    for (auto& x : e) x = ExactPoly::monomial(static_cast<long>(rng() % 5) - 2, static_cast<long>(rng() % 5) - 2);
    const PolyMatrix m(n, e, Symmetry::general);
    CHECK(det_small(to_series(m)) == Series(det(m)));
  }
}

TEST_CASE("Cholesky") {
  const SeriesMatrix id = square({{1, 0}, {0, 1}});
  CHECK(cholesky(id, 4) == id);
  const SeriesMatrix d = square({{4, 0}, {0, Series::monomial(1, 2)}});
  const SeriesMatrix q = cholesky(d, 4);
  CHECK(q[0][0] == Series(2));
  CHECK(q[1][1] == ts(1));
  CHECK(q[1][0].is_zero());
  // Textbook 2x2: q22 = sqrt(m22 - m12^2 / m11).
  const SeriesMatrix m = square({{Series::monomial(4, 2), ts(1)}, {ts(1), Series(1) + Series::monomial(1, 2)}});
  const SeriesMatrix c = cholesky(m, 20);
  CHECK(c[0][0] == Series::monomial(2, 1));
  CHECK(c[0][1] == Series(Rational(1, 2)));
  CHECK(c[1][0].is_zero());
  CHECK(reproduces(c, m));
  CHECK_THROWS_AS(cholesky(square({{1, 2}, {2, 1}}), 4), NotPositiveDefinite);
}

TEST_CASE("LDL^T and Gram factors") {
  const SeriesMatrix m = square({{2, ts(-1)}, {ts(-1), 3}});
  const Ldlt f = ldlt(m, 20);
  CHECK(f.d[0] == Series(2));
  CHECK(f.l[1][0] == Series::monomial(Rational(1, 2), -1));
  CHECK_THROWS_AS(cholesky(m, 20), std::domain_error);  // sqrt(2) is irrational
  const SeriesMatrix g = gram_factor(m, 20);
  CHECK(g.size() >= 2);
  CHECK(g.size() <= 8);
  CHECK(reproduces(g, m));
}

TEST_CASE("sums of squares") {
  for (long num = 1; num <= 40; ++num) {
    for (long den : {1, 2, 3, 5, 9}) {
      Rational q(num, den);
      q.canonicalize();
      const auto roots = sum_of_squares(q);
      REQUIRE(roots.size() >= 1);
      REQUIRE(roots.size() <= 4);
      Rational sum = 0;
      for (const Rational& r : roots) sum += r * r;
      CHECK(sum == q);
    }
  }
  CHECK(sum_of_squares(Rational(9, 4)).size() == 1);
  CHECK(sum_of_squares(2).size() == 2);
  CHECK(sum_of_squares(3).size() == 3);
  CHECK(sum_of_squares(7).size() == 4);
  CHECK_THROWS(sum_of_squares(0));
}

}
