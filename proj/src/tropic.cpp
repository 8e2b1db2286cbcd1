#include "arbor/tropic.hpp"

#include <algorithm>
#include <numeric>

namespace arbor {

Series::Series(const Rational& constant) {
  if (constant != 0) terms_.emplace(Rational(0), constant);
}

Series::Series(const ExactPoly& p) {
  for (const Term& term : p.terms()) terms_.emplace(term.exponent, term.coefficient);
}

Series Series::monomial(const Rational& coefficient, const Rational& exponent) {
  Series s;
  if (coefficient != 0) s.terms_.emplace(exponent, coefficient);
  return s;
}

Series Series::unknown_below(const Rational& p) {
  Series s;
  s.precision_ = p;
  return s;
}

std::int64_t Series::ramification() const {
  std::int64_t k = 1;
  for (const auto& [e, c] : terms_) k = lcm64(k, to_int64(e.get_den()));
  return k;
}

Rational Series::coefficient(const Rational& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? Rational(0) : it->second;
}

Term Series::leading_term() const {
  if (terms_.empty()) {
    if (precision_) throw PrecisionError("no known term above t^(" + precision_->get_str() + ")");
    throw std::domain_error("no leading term");
  }
  return {terms_.begin()->first, terms_.begin()->second};
}

void Series::clip() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0 || (precision_ && it->first <= *precision_)) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

Series Series::truncated(const Rational& p) const {
  Series s = *this;
  if (!s.precision_ || *s.precision_ < p) s.precision_ = p;
  s.clip();
  return s;
}

Series Series::substitute_power(const Rational& factor) const {
  if (factor <= 0) throw std::invalid_argument("series substitution needs a positive factor");
  Series s;
  for (const auto& [e, c] : terms_) s.terms_.emplace(Rational(e * factor), c);
  if (precision_) s.precision_ = *precision_ * factor;
  return s;
}

std::string Series::to_string() const {
  ExactPoly known;
  for (const auto& [e, c] : terms_) known += ExactPoly::monomial(c, e);
  if (!precision_) return known.to_string();
  const std::string tail = "O(" + ExactPoly::power(*precision_).to_string() + ")";
  if (known.is_zero()) return tail;
  return known.to_string() + " + " + tail;
}

Series Series::operator-() const {
  Series s = *this;
  for (auto& [e, c] : s.terms_) c = -c;
  return s;
}

Series& Series::operator+=(const Series& other) {
  for (const auto& [e, c] : other.terms_) terms_[e] += c;
  if (other.precision_ && (!precision_ || *precision_ < *other.precision_)) precision_ = other.precision_;
  clip();
  return *this;
}

Series& Series::operator-=(const Series& other) { return *this += -other; }

Series operator*(const Series& a, const Series& b) {
  if ((a.is_exact() && a.is_zero()) || (b.is_exact() && b.is_zero())) return Series();
  // Anchor of an operand: its leading exponent, or its precision when no
  // term is known.
  auto anchor = [](const Series& s) { return s.is_zero() ? *s.precision_ : s.terms_.begin()->first; };
  std::optional<Rational> p;
  if (a.precision_) p = anchor(b) + *a.precision_;
  if (b.precision_) {
    Rational q = anchor(a) + *b.precision_;
    if (!p || *p < q) p = q;
  }
  Series out;
  out.precision_ = p;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Rational e = ea + eb;
      if (p && e <= *p) break;  // b's exponents only decrease from here
      out.terms_[e] += ca * cb;
    }
  }
  out.clip();
  return out;
}

namespace {

struct Normalized {
  Rational lead;
  Rational coefficient;
  Series u;        // a / (c t^lead) - 1, all exponents negative
  Rational floor;  // relative precision of the expansion
};

Normalized normalize(const Series& a, const Rational& window) {
  const Term lead = a.leading_term();
  Normalized n{lead.exponent, lead.coefficient, Series(), Rational(0)};
  n.u = a * Series::monomial(1 / lead.coefficient, -lead.exponent) - Series(1);
  n.floor = a.precision() ? Rational(*a.precision() - lead.exponent) : Rational(-window);
  return n;
}

// sum_k coeff(k) u^k, truncated at `floor`; coeff(0) = 1.
template <class Coeff>
Series power_series(const Series& u, const Rational& floor, Coeff&& coeff) {
  if (u.is_zero() && u.is_exact()) return Series(1);
  Series sum(1), power(1);
  for (unsigned long k = 1;; ++k) {
    power = (power * u).truncated(floor);
    if (power.is_zero()) break;
    sum += Series(coeff(k)) * power;
  }
  return sum.truncated(floor);
}

}  // namespace

Series inverse(const Series& a, const Rational& window) {
  if (a.is_zero()) {
    if (a.is_exact()) throw std::domain_error("division by zero");
    throw PrecisionError("divisor has no known term");
  }
  const Normalized n = normalize(a, window);
  Series g = power_series(n.u, n.floor, [](unsigned long k) { return Rational(k % 2 == 0 ? 1 : -1); });
  return g * Series::monomial(1 / n.coefficient, -n.lead);
}

Series divide(const Series& a, const Series& b, const Rational& window) { return a * inverse(b, window); }

Series series_sqrt(const Series& a, const Rational& window) {
  if (a.is_zero() && a.is_exact()) throw std::domain_error("square root of a non-positive series");
  const Normalized n = normalize(a, window);
  if (n.coefficient <= 0) throw std::domain_error("square root of a non-positive series");
  const auto root = exact_root(n.coefficient, 2);
  if (!root) throw std::domain_error("leading coefficient " + n.coefficient.get_str() + " has no rational square root");
  Rational binom(1);
  Series g = power_series(n.u, n.floor, [&binom](unsigned long k) {
    binom *= Rational(Rational(1, 2) - Rational(static_cast<long>(k) - 1)) / Rational(static_cast<long>(k));
    return binom;
  });
  return g * Series::monomial(*root, n.lead / 2);
}

Series series_arith(const Series& a, const Series& b, SeriesOp op, const Rational& window) {
  switch (op) {
    case SeriesOp::add: return a + b;
    case SeriesOp::sub: return a - b;
    case SeriesOp::mul: return a * b;
    case SeriesOp::div: return divide(a, b, window);
  }
  throw std::invalid_argument("unknown series operation");
}

int compare(const Series& a, const Series& b) {
  const Series d = a - b;
  if (d.is_zero()) {
    if (d.is_exact()) return 0;
    throw PrecisionError("difference is O(t^(" + d.precision()->get_str() + "))");
  }
  return sgn(d.terms().begin()->second);
}

ExtRational valuation(const Series& x) {
  if (x.is_zero()) {
    if (x.is_exact()) return ExtRational::neg_inf();
    throw PrecisionError("valuation of O(t^(" + x.precision()->get_str() + "))");
  }
  return ExtRational(x.terms().begin()->first);
}

ExtRational valuation(const ExactPoly& p) {
  if (p.is_zero()) return ExtRational::neg_inf();
  return ExtRational(p.leading_term().exponent);
}

SeriesMatrix to_series(const PolyMatrix& m) {
  SeriesMatrix out(m.size(), std::vector<Series>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j] = Series(m(i, j));
  }
  return out;
}

SeriesMatrix multiply(const SeriesMatrix& a, const SeriesMatrix& b) {
  const std::size_t rows = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  SeriesMatrix out(rows, std::vector<Series>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i].size() != inner) throw std::invalid_argument("matrix shapes do not match");
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t k = 0; k < inner; ++k) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

SeriesMatrix transpose(const SeriesMatrix& a) {
  const std::size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  SeriesMatrix out(cols, std::vector<Series>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j][i] = a[i][j];
  }
  return out;
}

Series det_small(const SeriesMatrix& m) {
  const std::size_t n = m.size();
  if (n > 8) throw std::length_error("det_small is limited to n <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Series total;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (perm[i] > perm[j]) sign = -sign;
      }
    }
    Series product(sign);
    for (std::size_t i = 0; i < n; ++i) product = product * m[i][perm[i]];
    total += product;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Ldlt ldlt(const SeriesMatrix& m, const Rational& window) {
  const std::size_t n = m.size();
  Ldlt out{SeriesMatrix(n, std::vector<Series>(n)), std::vector<Series>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.l[j][j] = Series(1);
    Series pivot = m[j][j];
    for (std::size_t k = 0; k < j; ++k) pivot -= out.l[j][k] * out.l[j][k] * out.d[k];
    if (compare(pivot, Series()) <= 0) throw NotPositiveDefinite(j + 1);
    out.d[j] = pivot;
    const Series inv = inverse(pivot, window);
    for (std::size_t i = j + 1; i < n; ++i) {
      Series s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= out.l[i][k] * out.l[j][k] * out.d[k];
      out.l[i][j] = s * inv;
    }
  }
  return out;
}

SeriesMatrix cholesky(const SeriesMatrix& m, const Rational& window) {
  const Ldlt f = ldlt(m, window);
  const std::size_t n = m.size();
  SeriesMatrix q(n, std::vector<Series>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const Series root = series_sqrt(f.d[j], window);
    for (std::size_t i = j; i < n; ++i) q[j][i] = root * f.l[i][j];
  }
  return q;
}

SeriesMatrix gram_factor(const SeriesMatrix& m, const Rational& window) {
  const Ldlt f = ldlt(m, window);
  const std::size_t n = m.size();
  SeriesMatrix q;
  for (std::size_t j = 0; j < n; ++j) {
    const Rational c = f.d[j].leading_term().coefficient;
    const Series root = series_sqrt(f.d[j] * Series(Rational(1 / c)), window);
    for (const Rational& part : sum_of_squares(c)) {
      std::vector<Series> row(n);
      const Series scale = root * Series(part);
      for (std::size_t i = j; i < n; ++i) row[i] = scale * f.l[i][j];
      q.push_back(std::move(row));
    }
  }
  return q;
}

namespace {

bool is_square(const Integer& n, Integer& root) {
  if (n < 0) return false;
  mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
  return root * root == n;
}

bool two_squares(const Integer& n, std::vector<Integer>& out) {
  Integer r;
  if (is_square(n, r)) {
    out = {r};
    return true;
  }
  Integer x;
  mpz_sqrt(x.get_mpz_t(), n.get_mpz_t());
  for (; 2 * x * x >= n; --x) {
    if (is_square(n - x * x, r)) {
      out = {x, r};
      return true;
    }
  }
  return false;
}

bool three_square_form(Integer n) {
  if (n == 0) return true;
  while (n % 4 == 0) n /= 4;
  return n % 8 != 7;
}

bool three_squares(const Integer& n, std::vector<Integer>& out) {
  if (!three_square_form(n)) return false;
  if (two_squares(n, out)) return true;
  Integer x;
  mpz_sqrt(x.get_mpz_t(), n.get_mpz_t());
  for (; x > 0; --x) {
    std::vector<Integer> rest;
    if (two_squares(n - x * x, rest)) {
      out = {x};
      out.insert(out.end(), rest.begin(), rest.end());
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Rational> sum_of_squares(const Rational& q) {
  if (q <= 0) throw std::domain_error("sum_of_squares needs a positive rational");
  const Integer& den = q.get_den();
  const Integer n = q.get_num() * den;
  std::vector<Integer> parts;
  if (!three_squares(n, parts)) {
    Integer x;
    mpz_sqrt(x.get_mpz_t(), n.get_mpz_t());
    for (; x > 0; --x) {
      std::vector<Integer> rest;
      if (three_squares(n - x * x, rest)) {
        parts = {x};
        parts.insert(parts.end(), rest.begin(), rest.end());
        break;
      }
    }
  }
  std::vector<Rational> out;
  for (const Integer& x : parts) {
    if (x == 0) continue;
    Rational r(x, den);
    r.canonicalize();
    out.push_back(r);
  }
  return out;
}

}  // namespace arbor
