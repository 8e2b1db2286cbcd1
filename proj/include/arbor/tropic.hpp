#pragma once

// Truncated Puiseux series in t (exponents bounded above, decreasing) as an
// ordered field, their valuation, and LDL^T / Cholesky over them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbor/poly.hpp"

namespace arbor {

class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what)
      : std::runtime_error("insufficient precision: " + what + " (raise --window)") {}
};

/// sum_e c_e t^e + O(t^p): every coefficient with exponent > p is known
/// exactly; nothing is known at or below p. An exact series has no p.
/// The exact zero is the only series with no terms and no p.
class Series {
 public:
  Series() = default;
  Series(const Rational& constant);  // NOLINT
  Series(long constant) : Series(Rational(constant)) {}  // NOLINT
  explicit Series(const ExactPoly& p);

  static Series monomial(const Rational& coefficient, const Rational& exponent);
  /// O(t^p)
  static Series unknown_below(const Rational& p);

  bool is_exact() const { return !precision_.has_value(); }
  /// No known nonzero term (exact zero, or O(t^p) only).
  bool is_zero() const { return terms_.empty(); }
  const std::optional<Rational>& precision() const { return precision_; }
  /// lcm of the exponent denominators.
  std::int64_t ramification() const;
  const std::map<Rational, Rational, std::greater<>>& terms() const { return terms_; }
  Rational coefficient(const Rational& exponent) const;

  /// Leading exponent and coefficient; throws PrecisionError when no term
  /// is known and std::domain_error for the exact zero.
  Term leading_term() const;

  /// Drops terms at or below p and lowers the precision to p.
  Series truncated(const Rational& p) const;
  /// t -> t^factor with factor > 0.
  Series substitute_power(const Rational& factor) const;

  std::string to_string() const;

  Series operator-() const;
  Series& operator+=(const Series& other);
  Series& operator-=(const Series& other);
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(const Series& a, const Series& b);

  /// Same known terms and precision.
  friend bool operator==(const Series&, const Series&) = default;

 private:
  void clip();

  std::map<Rational, Rational, std::greater<>> terms_;
  std::optional<Rational> precision_;
};

/// 1/a. An exact a is expanded to `window` below its own leading exponent;
/// an inexact a keeps its relative precision.
Series inverse(const Series& a, const Rational& window);
Series divide(const Series& a, const Series& b, const Rational& window);
/// Square root with positive leading coefficient. Requires a > 0 and a
/// rational square root of the leading coefficient.
Series series_sqrt(const Series& a, const Rational& window);

enum class SeriesOp { add, sub, mul, div };
Series series_arith(const Series& a, const Series& b, SeriesOp op, const Rational& window);

/// -1, 0, 1. Throws PrecisionError when a - b has no known term and is not
/// exact; never guesses.
int compare(const Series& a, const Series& b);

/// Leading exponent; -inf for the exact zero. Throws PrecisionError for an
/// inexact series with no known term.
ExtRational valuation(const Series& x);
ExtRational valuation(const ExactPoly& p);

using SeriesMatrix = std::vector<std::vector<Series>>;

SeriesMatrix to_series(const PolyMatrix& m);
SeriesMatrix multiply(const SeriesMatrix& a, const SeriesMatrix& b);
SeriesMatrix transpose(const SeriesMatrix& a);
/// Leibniz expansion; intended for small k.
Series det_small(const SeriesMatrix& m);

class NotPositiveDefinite : public std::domain_error {
 public:
  explicit NotPositiveDefinite(std::size_t minor)
      : std::domain_error("not positive definite: leading minor " + std::to_string(minor) +
                          " is not positive"),
        minor_(minor) {}
  std::size_t minor() const { return minor_; }

 private:
  std::size_t minor_;
};

/// m = L diag(d) L^T with unit lower-triangular L. Pivots must be positive.
struct Ldlt {
  SeriesMatrix l;
  std::vector<Series> d;
};
Ldlt ldlt(const SeriesMatrix& m, const Rational& window);

/// Upper-triangular Q with Q^T Q = m and positive diagonal. Throws
/// std::domain_error when a pivot's leading coefficient has no rational
/// square root.
SeriesMatrix cholesky(const SeriesMatrix& m, const Rational& window);

/// A matrix Q with Q^T Q = m for any positive definite m: each pivot
/// d = c s^2 is split with c a sum of at most four rational squares, so Q
/// has between n and 4n rows.
SeriesMatrix gram_factor(const SeriesMatrix& m, const Rational& window);

/// Writes a positive rational as a sum of as few rational squares as
/// possible (at most four); returns the square roots.
std::vector<Rational> sum_of_squares(const Rational& q);

}  // namespace arbor
