#pragma once

// Sparse Laurent polynomials in one indeterminate t with rational exponents
// and exact rational coefficients, and exact determinants / Pfaffians of
// matrices over them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "arbor/rational.hpp"

namespace arbor {

struct Term {
  Rational exponent;
  Rational coefficient;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Exponents are stored as integer numerators over one shared positive
/// denominator, kept minimal. No stored coefficient is zero, so structural
/// equality is mathematical equality.
class ExactPoly {
 public:
  ExactPoly() = default;
  ExactPoly(const Rational& constant);  // NOLINT: constants promote implicitly
  ExactPoly(long constant) : ExactPoly(Rational(constant)) {}  // NOLINT

  static ExactPoly monomial(const Rational& coefficient, const Rational& exponent);
  /// t^exponent
  static ExactPoly power(const Rational& exponent) { return monomial(Rational(1), exponent); }

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  std::int64_t exponent_denominator() const { return den_; }

  /// Terms in strictly decreasing exponent order.
  std::vector<Term> terms() const;
  Rational coefficient(const Rational& exponent) const;

  /// Maximal exponent and its coefficient. Throws std::domain_error
  /// ("no leading term") on the zero polynomial.
  Term leading_term() const;
  /// Minimal exponent; throws on zero.
  Rational lowest_exponent() const;

  /// t -> t^factor (factor != 0); factor = -1 gives the t -> 1/t substitution.
  ExactPoly substitute_power(const Rational& factor) const;

  std::string to_string() const;

  ExactPoly operator-() const;
  ExactPoly& operator+=(const ExactPoly& other);
  ExactPoly& operator-=(const ExactPoly& other);
  ExactPoly& operator*=(const ExactPoly& other);
  friend ExactPoly operator+(ExactPoly a, const ExactPoly& b) { return a += b; }
  friend ExactPoly operator-(ExactPoly a, const ExactPoly& b) { return a -= b; }
  friend ExactPoly operator*(const ExactPoly& a, const ExactPoly& b);
  friend bool operator==(const ExactPoly& a, const ExactPoly& b) {
    return a.den_ == b.den_ && a.terms_ == b.terms_;
  }

  /// Exact quotient in the Laurent ring; throws std::domain_error when the
  /// division leaves a remainder or the divisor is zero.
  friend ExactPoly exact_divide(const ExactPoly& numerator, const ExactPoly& divisor);

  ExactPoly pow(unsigned exponent) const;

 private:
  friend class PolyAccumulator;
  void normalize();
  std::map<std::int64_t, Rational> rescaled(std::int64_t den) const;

  std::int64_t den_ = 1;
  std::map<std::int64_t, Rational> terms_;
};

enum class PolyOp { add, sub, mul };
ExactPoly arith(const ExactPoly& a, const ExactPoly& b, PolyOp op);

inline Term leading_term(const ExactPoly& p) { return p.leading_term(); }

/// Sums many monomials without materialising intermediate polynomials.
/// Insertion order does not affect the result.
class PolyAccumulator {
 public:
  void add(const Rational& exponent, const Rational& coefficient);
  void add(const Rational& exponent, long coefficient) { add(exponent, Rational(coefficient)); }
  void merge(const PolyAccumulator& other);
  ExactPoly result() const;

 private:
  std::map<Rational, Rational> terms_;
};

/// Value of a polynomial at t = tau: exact when every power of tau is
/// rational, otherwise a 256-bit floating approximation only.
struct Evaluation {
  bool exact = false;
  Rational value;
  mpf_class approx{0, 256};
};

/// Throws std::domain_error for tau <= 0 with fractional exponents and for
/// tau = 0 with negative exponents.
Evaluation eval_at(const ExactPoly& p, const Rational& tau);

/// Exact k-th root of a nonnegative rational, if one exists.
std::optional<Rational> exact_root(const Rational& value, unsigned long k);

enum class Symmetry { general, symmetric, skew };

class PolyMatrix {
 public:
  /// Zero matrix.
  explicit PolyMatrix(std::size_t n = 0, Symmetry tag = Symmetry::general);
  /// Row-major entries; validated against the tag (std::invalid_argument).
  PolyMatrix(std::size_t n, std::vector<ExactPoly> entries, Symmetry tag);

  /// Builds from fn(i, j). For symmetric/skew tags fn is called only for
  /// i <= j (i < j for skew) and mirrored.
  static PolyMatrix generate(std::size_t n, Symmetry tag,
                             const std::function<ExactPoly(std::size_t, std::size_t)>& fn);

  std::size_t size() const { return n_; }
  Symmetry tag() const { return tag_; }
  const ExactPoly& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

  PolyMatrix principal(std::span<const std::size_t> rows) const;
  PolyMatrix substitute_power(const Rational& factor) const;

 private:
  std::size_t n_;
  Symmetry tag_;
  std::vector<ExactPoly> entries_;
};

enum class DetMethod { bareiss, expansion };

/// Exact determinant. bareiss: fraction-free elimination with exact
/// division. expansion: permutation sum (n <= 8), kept as a cross-check.
ExactPoly det(const PolyMatrix& m, DetMethod method = DetMethod::bareiss);

/// Pfaffian via first-row expansion
///   Pf[X] = sum_j (-1)^(i+j+1) b_ij Pf[X \ {i,j}],
/// with Pf of the empty matrix equal to 1. Requires the skew tag and even size.
ExactPoly pfaffian(const PolyMatrix& m);

/// Pf of every principal submatrix, indexed by row bitmask (odd masks hold 0).
std::vector<ExactPoly> principal_pfaffians(const PolyMatrix& m);

}  // namespace arbor
