#include "arbor/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace arbor {

namespace {

// Splits a rational exponent into numerator / denominator int64s.
std::pair<std::int64_t, std::int64_t> split_exponent(const Rational& e) {
  return {to_int64(e.get_num()), to_int64(e.get_den())};
}

std::string exponent_text(const Rational& e) {
  if (is_integer(e) && e > 0) return e.get_str();
  return "(" + e.get_str() + ")";
}

}  // namespace

ExactPoly::ExactPoly(const Rational& constant) {
  if (constant != 0) terms_.emplace(0, constant);
}

ExactPoly ExactPoly::monomial(const Rational& coefficient, const Rational& exponent) {
  ExactPoly p;
  if (coefficient == 0) return p;
  auto [num, den] = split_exponent(exponent);
  p.den_ = den;
  p.terms_.emplace(num, coefficient);
  return p;
}

void ExactPoly::normalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it = it->second == 0 ? terms_.erase(it) : std::next(it);
  }
  if (terms_.empty()) {
    den_ = 1;
    return;
  }
  std::int64_t g = den_;
  for (const auto& [num, coeff] : terms_) g = std::gcd(g, num);
  if (g > 1) {
    std::map<std::int64_t, Rational> reduced;
    for (auto& [num, coeff] : terms_) reduced.emplace_hint(reduced.end(), num / g, std::move(coeff));
    terms_ = std::move(reduced);
    den_ /= g;
  }
}

std::map<std::int64_t, Rational> ExactPoly::rescaled(std::int64_t den) const {
  if (den == den_) return terms_;
  const std::int64_t factor = den / den_;
  std::map<std::int64_t, Rational> out;
  for (const auto& [num, coeff] : terms_) out.emplace_hint(out.end(), checked_mul(num, factor), coeff);
  return out;
}

std::vector<Term> ExactPoly::terms() const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    out.push_back({Rational(it->first, den_), it->second});
    out.back().exponent.canonicalize();
  }
  return out;
}

Rational ExactPoly::coefficient(const Rational& exponent) const {
  Rational scaled = exponent * den_;
  if (scaled.get_den() != 1) return 0;
  auto it = terms_.find(to_int64(scaled.get_num()));
  return it == terms_.end() ? Rational(0) : it->second;
}

Term ExactPoly::leading_term() const {
  if (terms_.empty()) throw std::domain_error("no leading term");
  const auto& [num, coeff] = *terms_.rbegin();
  Rational e(num, den_);
  e.canonicalize();
  return {e, coeff};
}

Rational ExactPoly::lowest_exponent() const {
  if (terms_.empty()) throw std::domain_error("no lowest term");
  Rational e(terms_.begin()->first, den_);
  e.canonicalize();
  return e;
}

ExactPoly ExactPoly::substitute_power(const Rational& factor) const {
  if (factor == 0) throw std::domain_error("substitute_power by zero");
  ExactPoly out;
  for (const auto& [num, coeff] : terms_) {
    Rational e = Rational(num, den_) * factor;
    e.canonicalize();
    out += monomial(coeff, e);
  }
  return out;
}

std::string ExactPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& term : terms()) {
    const bool negative = term.coefficient < 0;
    Rational magnitude = abs(term.coefficient);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (term.exponent == 0) {
      out += magnitude.get_str();
      continue;
    }
    if (magnitude != 1) {
      out += is_integer(magnitude) ? magnitude.get_str() : "(" + magnitude.get_str() + ")";
      out += "*";
    }
    out += "t";
    if (term.exponent != 1) out += "^" + exponent_text(term.exponent);
  }
  return out;
}

ExactPoly ExactPoly::operator-() const {
  ExactPoly out = *this;
  for (auto& [num, coeff] : out.terms_) coeff = -coeff;
  return out;
}

ExactPoly& ExactPoly::operator+=(const ExactPoly& other) {
  if (other.terms_.empty()) return *this;
  const std::int64_t den = lcm64(den_, other.den_);
  terms_ = rescaled(den);
  den_ = den;
  for (const auto& [num, coeff] : other.rescaled(den)) {
    auto [it, inserted] = terms_.try_emplace(num, coeff);
    if (!inserted) it->second += coeff;
  }
  normalize();
  return *this;
}

ExactPoly& ExactPoly::operator-=(const ExactPoly& other) { return *this += -other; }

ExactPoly operator*(const ExactPoly& a, const ExactPoly& b) {
  ExactPoly out;
  if (a.terms_.empty() || b.terms_.empty()) return out;
  const std::int64_t den = lcm64(a.den_, b.den_);
  const auto lhs = a.rescaled(den);
  const auto rhs = b.rescaled(den);
  out.den_ = den;
  for (const auto& [na, ca] : lhs) {
    for (const auto& [nb, cb] : rhs) {
      Rational product = ca * cb;
      auto [it, inserted] = out.terms_.try_emplace(checked_add(na, nb), product);
      if (!inserted) it->second += product;
    }
  }
  out.normalize();
  return out;
}

ExactPoly& ExactPoly::operator*=(const ExactPoly& other) { return *this = *this * other; }

ExactPoly exact_divide(const ExactPoly& numerator, const ExactPoly& divisor) {
  if (divisor.is_zero()) throw std::domain_error("division by zero polynomial");
  if (numerator.is_zero()) return {};
  const std::int64_t den = lcm64(numerator.den_, divisor.den_);
  auto rem = numerator.rescaled(den);
  const auto dsr = divisor.rescaled(den);
  const auto [dlead, dcoeff] = *dsr.rbegin();
  const std::int64_t dlow = dsr.begin()->first;
  const std::int64_t qlow = checked_add(rem.begin()->first, -dlow);

  ExactPoly quotient;
  quotient.den_ = den;
  while (!rem.empty()) {
    const auto [rlead, rcoeff] = *rem.rbegin();
    const std::int64_t qexp = checked_add(rlead, -dlead);
    if (qexp < qlow) throw std::domain_error("inexact polynomial division");
    const Rational qcoeff = rcoeff / dcoeff;
    quotient.terms_.emplace(qexp, qcoeff);
    for (const auto& [dn, dc] : dsr) {
      const std::int64_t e = checked_add(qexp, dn);
      auto [it, inserted] = rem.try_emplace(e, -qcoeff * dc);
      if (!inserted) {
        it->second -= qcoeff * dc;
        if (it->second == 0) rem.erase(it);
      }
    }
  }
  quotient.normalize();
  return quotient;
}

ExactPoly ExactPoly::pow(unsigned exponent) const {
  ExactPoly result(1L), base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent > 0) base *= base;
  }
  return result;
}

ExactPoly arith(const ExactPoly& a, const ExactPoly& b, PolyOp op) {
  switch (op) {
    case PolyOp::add: return a + b;
    case PolyOp::sub: return a - b;
    case PolyOp::mul: return a * b;
  }
  throw std::invalid_argument("unknown PolyOp");
}

void PolyAccumulator::add(const Rational& exponent, const Rational& coefficient) {
  if (coefficient == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponent, coefficient);
  if (!inserted) it->second += coefficient;
}

void PolyAccumulator::merge(const PolyAccumulator& other) {
  for (const auto& [e, c] : other.terms_) add(e, c);
}

ExactPoly PolyAccumulator::result() const {
  ExactPoly out;
  std::int64_t den = 1;
  for (const auto& [e, c] : terms_) {
    if (c != 0) den = lcm64(den, to_int64(e.get_den()));
  }
  out.den_ = den;
  for (const auto& [e, c] : terms_) {
    if (c == 0) continue;
    Rational scaled = e * den;
    out.terms_.emplace(to_int64(scaled.get_num()), c);
  }
  out.normalize();
  return out;
}

std::optional<Rational> exact_root(const Rational& value, unsigned long k) {
  if (value < 0) return std::nullopt;
  if (k == 1) return value;
  Integer num_root, den_root;
  const bool num_exact = mpz_root(num_root.get_mpz_t(), value.get_num_mpz_t(), k) != 0;
  const bool den_exact = mpz_root(den_root.get_mpz_t(), value.get_den_mpz_t(), k) != 0;
  if (!num_exact || !den_exact) return std::nullopt;
  Rational r(num_root, den_root);
  r.canonicalize();
  return r;
}

namespace {

constexpr mp_bitcnt_t kFloatBits = 256;

// k-th root of a positive float by Newton iteration.
mpf_class float_root(const mpf_class& x, unsigned long k) {
  if (k == 1) return x;
  mpf_class y(std::pow(x.get_d(), 1.0 / static_cast<double>(k)), kFloatBits);
  if (y <= 0) y = 1;
  for (int iter = 0; iter < 200; ++iter) {
    mpf_class yk1(1, kFloatBits);
    mpf_pow_ui(yk1.get_mpf_t(), y.get_mpf_t(), k - 1);
    mpf_class next = ((k - 1) * y + x / yk1) / k;
    mpf_class delta = abs(next - y);
    y = next;
    if (delta == 0 || delta < abs(y) * mpf_class("1e-75", kFloatBits)) break;
  }
  return y;
}

mpf_class float_power(const Rational& tau, const Rational& exponent) {
  mpf_class base(tau, kFloatBits);
  mpf_class root = float_root(base, exponent.get_den().get_ui());
  const Integer& num = exponent.get_num();
  mpf_class out(1, kFloatBits);
  mpf_pow_ui(out.get_mpf_t(), root.get_mpf_t(), Integer(abs(num)).get_ui());
  if (num < 0) out = mpf_class(1, kFloatBits) / out;
  return out;
}

}  // namespace

Evaluation eval_at(const ExactPoly& p, const Rational& tau) {
  Evaluation result;
  result.exact = true;
  result.value = 0;
  for (const Term& term : p.terms()) {
    const bool fractional = !is_integer(term.exponent);
    if (fractional && tau < 0) {
      throw std::domain_error("negative base with fractional exponent");
    }
    if (tau == 0) {
      if (term.exponent < 0) throw std::domain_error("zero base with negative exponent");
      if (term.exponent == 0) result.value += term.coefficient;
      continue;
    }
    if (!result.exact) continue;
    auto root = exact_root(abs(tau), term.exponent.get_den().get_ui());
    if (!root) {
      result.exact = false;
      continue;
    }
    if (tau < 0) *root = -*root;  // integer exponent: keep the sign of tau
    Rational power(1);
    const unsigned long e = Integer(abs(term.exponent.get_num())).get_ui();
    mpz_pow_ui(power.get_num_mpz_t(), root->get_num_mpz_t(), e);
    mpz_pow_ui(power.get_den_mpz_t(), root->get_den_mpz_t(), e);
    power.canonicalize();
    if (term.exponent < 0) power = 1 / power;
    result.value += term.coefficient * power;
  }
  if (result.exact) {
    result.approx = mpf_class(result.value, kFloatBits);
    return result;
  }
  result.value = 0;
  mpf_class sum(0, kFloatBits);
  for (const Term& term : p.terms()) {
    if (tau < 0) {
      // integer exponents only here
      mpf_class b(tau, kFloatBits), pw(1, kFloatBits);
      mpf_pow_ui(pw.get_mpf_t(), b.get_mpf_t(), Integer(abs(term.exponent.get_num())).get_ui());
      if (term.exponent < 0) pw = mpf_class(1, kFloatBits) / pw;
      sum += mpf_class(term.coefficient, kFloatBits) * pw;
    } else {
      sum += mpf_class(term.coefficient, kFloatBits) * float_power(tau, term.exponent);
    }
  }
  result.approx = sum;
  return result;
}

PolyMatrix::PolyMatrix(std::size_t n, Symmetry tag) : n_(n), tag_(tag), entries_(n * n) {}

PolyMatrix::PolyMatrix(std::size_t n, std::vector<ExactPoly> entries, Symmetry tag)
    : n_(n), tag_(tag), entries_(std::move(entries)) {
  if (entries_.size() != n * n) throw std::invalid_argument("PolyMatrix: wrong entry count");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const ExactPoly& a = entries_[i * n + j];
      const ExactPoly& b = entries_[j * n + i];
      if (tag == Symmetry::symmetric && !(a == b)) {
        throw std::invalid_argument("PolyMatrix: symmetric tag on asymmetric entries");
      }
      if (tag == Symmetry::skew && !(a == -b)) {
        throw std::invalid_argument("PolyMatrix: skew tag on non-skew entries");
      }
    }
  }
}

PolyMatrix PolyMatrix::generate(std::size_t n, Symmetry tag,
                                const std::function<ExactPoly(std::size_t, std::size_t)>& fn) {
  PolyMatrix m(n, tag);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      switch (tag) {
        case Symmetry::general:
          m.entries_[i * n + j] = fn(i, j);
          break;
        case Symmetry::symmetric:
          if (i <= j) m.entries_[i * n + j] = m.entries_[j * n + i] = fn(i, j);
          break;
        case Symmetry::skew:
          if (i < j) {
            m.entries_[i * n + j] = fn(i, j);
            m.entries_[j * n + i] = -m.entries_[i * n + j];
          }
          break;
      }
    }
  }
  return m;
}

PolyMatrix PolyMatrix::principal(std::span<const std::size_t> rows) const {
  const std::size_t k = rows.size();
  std::vector<ExactPoly> sub;
  sub.reserve(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) sub.push_back((*this)(rows[a], rows[b]));
  }
  return PolyMatrix(k, std::move(sub), tag_);
}

PolyMatrix PolyMatrix::substitute_power(const Rational& factor) const {
  PolyMatrix out(n_, tag_);
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].substitute_power(factor);
  return out;
}

namespace {

ExactPoly det_bareiss(const PolyMatrix& m) {
  const std::size_t n = m.size();
  if (n == 0) return ExactPoly(1L);
  std::vector<std::vector<ExactPoly>> a(n, std::vector<ExactPoly>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
  }
  bool negate = false;
  ExactPoly previous(1L);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k].is_zero()) {
      std::size_t pivot = k + 1;
      while (pivot < n && a[pivot][k].is_zero()) ++pivot;
      if (pivot == n) return {};
      std::swap(a[k], a[pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a[i][j] = exact_divide(a[i][j] * a[k][k] - a[i][k] * a[k][j], previous);
      }
      a[i][k] = ExactPoly();
    }
    previous = a[k][k];
  }
  return negate ? -a[n - 1][n - 1] : a[n - 1][n - 1];
}

ExactPoly det_permutations(const PolyMatrix& m) {
  const std::size_t n = m.size();
  if (n > 8) throw std::invalid_argument("permutation determinant limited to n <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  ExactPoly sum;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j] ? 1 : 0;
    }
    ExactPoly product(1L);
    for (std::size_t i = 0; i < n && !product.is_zero(); ++i) product *= m(i, perm[i]);
    if (inversions % 2 == 0) {
      sum += product;
    } else {
      sum -= product;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

void require_pfaffian_shape(const PolyMatrix& m) {
  if (m.tag() != Symmetry::skew) throw std::invalid_argument("pfaffian requires a skew matrix");
  if (m.size() % 2 != 0) throw std::invalid_argument("pfaffian requires even dimension");
  if (m.size() > 62) throw std::invalid_argument("pfaffian limited to dimension <= 62");
}

ExactPoly pfaffian_rec(const PolyMatrix& m, std::uint64_t mask,
                       std::unordered_map<std::uint64_t, ExactPoly>& memo) {
  if (mask == 0) return ExactPoly(1L);
  if (auto it = memo.find(mask); it != memo.end()) return it->second;
  const unsigned i = static_cast<unsigned>(__builtin_ctzll(mask));
  const std::uint64_t rest = mask & (mask - 1);
  ExactPoly sum;
  unsigned position = 1;  // position of i within the current index set
  for (std::uint64_t scan = rest; scan != 0; scan &= scan - 1) {
    const unsigned j = static_cast<unsigned>(__builtin_ctzll(scan));
    ++position;
    const ExactPoly& b = m(i, j);
    if (b.is_zero()) continue;
    ExactPoly term = b * pfaffian_rec(m, rest & ~(std::uint64_t{1} << j), memo);
    // (-1)^(1 + position + 1)
    if (position % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  memo.emplace(mask, sum);
  return sum;
}

}  // namespace

ExactPoly det(const PolyMatrix& m, DetMethod method) {
  return method == DetMethod::bareiss ? det_bareiss(m) : det_permutations(m);
}

ExactPoly pfaffian(const PolyMatrix& m) {
  require_pfaffian_shape(m);
  std::unordered_map<std::uint64_t, ExactPoly> memo;
  const std::uint64_t full = m.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m.size()) - 1;
  return pfaffian_rec(m, full, memo);
}

std::vector<ExactPoly> principal_pfaffians(const PolyMatrix& m) {
  if (m.tag() != Symmetry::skew) throw std::invalid_argument("pfaffian requires a skew matrix");
  if (m.size() > 24) throw std::invalid_argument("principal_pfaffians limited to dimension <= 24");
  const std::uint64_t count = std::uint64_t{1} << m.size();
  std::vector<ExactPoly> pf(count);
  pf[0] = ExactPoly(1L);
  // masks are processed in increasing order; every submask lookup is smaller
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    if (__builtin_popcountll(mask) % 2 != 0) continue;
    const unsigned i = static_cast<unsigned>(__builtin_ctzll(mask));
    const std::uint64_t rest = mask & (mask - 1);
    ExactPoly sum;
    unsigned position = 1;
    for (std::uint64_t scan = rest; scan != 0; scan &= scan - 1) {
      const unsigned j = static_cast<unsigned>(__builtin_ctzll(scan));
      ++position;
      const ExactPoly& b = m(i, j);
      const ExactPoly& sub = pf[rest & ~(std::uint64_t{1} << j)];
      if (b.is_zero() || sub.is_zero()) continue;
      if (position % 2 == 0) {
        sum += b * sub;
      } else {
        sum -= b * sub;
      }
    }
    pf[mask] = std::move(sum);
  }
  return pf;
}

}  // namespace arbor
