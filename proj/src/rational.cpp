#include "arbor/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>

namespace arbor {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  text = trim(text);
  auto fail = [&]() -> ParseError {
    return ParseError("not a rational number: '" + std::string(original) + "'");
  };
  if (text.empty()) throw fail();

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    Integer n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator in '" + std::string(original) + "'");
    result = Rational(n, d);
    result.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_part = text.substr(e + 1);
      text = text.substr(0, e);
      bool exp_negative = false;
      if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
        exp_negative = exp_part.front() == '-';
        exp_part.remove_prefix(1);
      }
      if (!all_digits(exp_part) || exp_part.size() > 6) throw fail();
      exponent = std::stol(std::string(exp_part));
      if (exp_negative) exponent = -exponent;
    }
    std::string_view int_part = text, frac_part;
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      int_part = text.substr(0, dot);
      frac_part = text.substr(dot + 1);
    }
    if (int_part.empty() && frac_part.empty()) throw fail();
    if (!int_part.empty() && !all_digits(int_part)) throw fail();
    if (!frac_part.empty() && !all_digits(frac_part)) throw fail();
    Integer mantissa(std::string(int_part) + std::string(frac_part));
    long scale = static_cast<long>(frac_part.size()) - exponent;
    if (scale >= 0) {
      result = Rational(mantissa, pow10(static_cast<unsigned long>(scale)));
    } else {
      result = Rational(mantissa * pow10(static_cast<unsigned long>(-scale)));
    }
    result.canonicalize();
  }
  return negative ? Rational(-result) : result;
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

bool is_integer(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_den() == 1;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
  return r;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / std::gcd(a, b), b);
}

std::int64_t to_int64(const Integer& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw std::overflow_error("integer does not fit 64 bits");
  return z.get_si();
}

const Rational& ExtRational::value() const {
  if (!value_) throw std::domain_error("value() of -inf");
  return *value_;
}

ExtRational operator+(const ExtRational& a, const ExtRational& b) {
  if (!a.value_ || !b.value_) return {};
  return ExtRational(Rational(*a.value_ + *b.value_));
}

ExtRational operator-(const ExtRational& a) {
  if (!a.value_) throw std::domain_error("negation of -inf");
  return ExtRational(Rational(-*a.value_));
}

bool operator==(const ExtRational& a, const ExtRational& b) {
  if (a.value_.has_value() != b.value_.has_value()) return false;
  return !a.value_ || *a.value_ == *b.value_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
  if (!a.value_ || !b.value_) {
    return a.value_.has_value() <=> b.value_.has_value();
  }
  int c = cmp(*a.value_, *b.value_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string ExtRational::to_string() const {
  return value_ ? arbor::to_string(*value_) : std::string("-inf");
}

ExtRational ExtRational::parse(std::string_view text) {
  std::string_view t = trim(text);
  if (t == "-inf" || t == "-Inf" || t == "-INF") return {};
  return ExtRational(parse_rational(t));
}

ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }

}  // namespace arbor
