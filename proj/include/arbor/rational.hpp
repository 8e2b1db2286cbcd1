#pragma once

// Exact scalars shared by every module: GMP rationals and the max-plus
// extension Q ∪ {-inf}.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arbor {

using Rational = mpq_class;
using Integer = mpz_class;

/// Raised for malformed textual input (numbers, files, CSV rows).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses "7", "-2/5", "+3", "1.25", "-.5" or "2e-3" into an exact rational.
Rational parse_rational(std::string_view text);

/// Canonical text: "3", "-2/5".
std::string to_string(const Rational& q);

bool is_integer(const Rational& q);

/// Checked 64-bit helpers used by exponent bookkeeping.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);
std::int64_t to_int64(const Integer& z);

/// An element of Q ∪ {-inf} ordered by the max-plus convention:
/// -inf is below every rational and absorbs addition.
class ExtRational {
 public:
  /// Defaults to -inf.
  ExtRational() = default;
  ExtRational(Rational value) : value_(std::move(value)) {}  // NOLINT
  ExtRational(long value) : value_(Rational(value)) {}        // NOLINT

  static ExtRational neg_inf() { return {}; }

  bool is_finite() const { return value_.has_value(); }
  bool is_neg_inf() const { return !value_.has_value(); }
  /// Precondition: is_finite().
  const Rational& value() const;

  friend ExtRational operator+(const ExtRational& a, const ExtRational& b);
  friend ExtRational operator-(const ExtRational& a);  // only for finite values
  friend bool operator==(const ExtRational& a, const ExtRational& b);
  friend std::strong_ordering operator<=>(const ExtRational& a,
                                          const ExtRational& b);

  std::string to_string() const;
  static ExtRational parse(std::string_view text);

 private:
  std::optional<Rational> value_;
};

ExtRational max(const ExtRational& a, const ExtRational& b);

}  // namespace arbor
