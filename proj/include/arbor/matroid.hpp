#pragma once

// Exchange-axiom checkers (valuated matroid, valuated Delta-matroid, rank-2
// M-concavity), the tree dissimilarity maps, and their Pfaffian / Puiseux
// representations.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arbor/metric.hpp"
#include "arbor/poly.hpp"
#include "arbor/tree.hpp"
#include "arbor/tropic.hpp"

namespace arbor {

/// A function on subsets of a labelled ground set. With a rank k it is
/// defined on k-subsets only; without one, on every subset. Subsets are
/// bitmasks over ground positions. Unset values are -inf.
class SetFunction {
 public:
  SetFunction(std::vector<Vertex> ground, std::optional<std::size_t> rank);

  const std::vector<Vertex>& ground() const { return ground_; }
  std::size_t ground_size() const { return ground_.size(); }
  const std::optional<std::size_t>& rank() const { return rank_; }
  bool in_domain(std::uint64_t mask) const;

  const ExtRational& operator[](std::uint64_t mask) const { return values_.at(mask); }
  void set(std::uint64_t mask, ExtRational value);

  std::vector<Vertex> labels(std::uint64_t mask) const;
  std::uint64_t mask_of(std::span<const Vertex> labels) const;
  /// "1,3,4"; the empty set is "".
  std::string key(std::uint64_t mask) const;

  /// -w on finite values, -inf kept.
  SetFunction negated() const;

 private:
  std::vector<Vertex> ground_;
  std::optional<std::size_t> rank_;
  std::vector<ExtRational> values_;
};

struct ExchangeOptions {
  std::uint64_t exhaustive_cap = 4'000'000;  // (X, Y) pairs
  std::size_t samples = 200'000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

struct ExchangeViolation {
  std::vector<Vertex> x;
  std::vector<Vertex> y;
  Vertex i;
  ExtRational lhs;
  ExtRational rhs;
};

struct ExchangeReport {
  bool ok = true;
  bool sampled = false;
  std::uint64_t checked = 0;  // (X, Y, i) triples
  std::optional<ExchangeViolation> violation;
};

/// w(X) + w(Y) <= max_{j in Y\X} w(X-i+j) + w(Y-j+i) for all X, Y, i in X\Y.
ExchangeReport check_valuated_matroid(const SetFunction& w, const ExchangeOptions& options = {});
/// w(X) + w(Y) <= max_{j in (X^Y)\i} w(X^{i,j}) + w(Y^{i,j}) for all X, Y,
/// i in X^Y; an empty max is -inf.
ExchangeReport check_delta_matroid(const SetFunction& w, const ExchangeOptions& options = {});

struct MConcaveReport {
  bool ok = true;
  /// u = e_a + e_b, v = e_c + e_d (1-based) and the index i with u_i < v_i.
  std::optional<std::array<std::size_t, 5>> exchange_violation;
  std::optional<Quadruple> four_point_violation;
};

/// [M-EXC] on f(e_i + e_j) = f_ij, checked directly and against the 4PC.
/// Throws std::logic_error if the two disagree.
MConcaveReport check_m_concave_rank2(const SymMatrixQ& f);

/// Y -> l(E_Y) on k-subsets of the leaves.
SetFunction k_dissimilarity(const Tree& tree, std::size_t k);
/// Y -> l(E_{Y u root}) on k-subsets of the leaves other than root.
SetFunction rooted_k_dissimilarity(const Tree& tree, Vertex root, std::size_t k);
/// X -> l(O_X) for even |X|, -inf for odd |X|, on all vertex subsets.
SetFunction odd_dissimilarity(const Tree& tree);

struct OddRepresentationReport {
  bool ok = true;
  VertexSet order;          // nice order used for B
  std::size_t checked = 0;  // even subsets
  std::optional<std::vector<Vertex>> mismatch;
  std::string detail;
};

/// val(Pf B[X]) = D^o(X) and val(Pf B^v[X]) = -D^o(X) for every even X,
/// with V in nice order and B^v the t -> 1/t substitution of B.
OddRepresentationReport represent_odd(const Tree& tree, std::size_t max_vertices = 16);

struct RootedRow {
  std::vector<Vertex> y;
  Rational d0;             // D_0^k(Y)
  ExactPoly det_m;         // det M[Y]
  bool schur_ok = true;    // det M[Y] = det A[Y u root]
  ExtRational val_exact;   // val(det M[Y] at t^(1/2))
  std::optional<ExtRational> val_series;  // val(det R_Y)
};

struct RootedOptions {
  std::optional<Rational> window;  // default: 4 * exponent spread of M
  std::uint64_t seed = 1;
  unsigned max_reseeds = 5;
  std::size_t max_subsets = 5000;  // beyond this Y is sampled
};

struct RootedReport {
  bool ok = true;
  bool exact_ok = true;             // exact polynomial path
  bool negative_definite = true;    // sign pattern of nested minors of M
  bool series_ok = true;            // series path agrees with exact path
  bool sampled = false;
  std::vector<Vertex> ground;
  Rational window;
  unsigned attempts = 0;
  std::uint64_t seed_used = 0;
  SeriesMatrix r;                   // k x n, the representation
  std::vector<RootedRow> rows;
  std::string failure;
};

/// M = (t^d_ij - t^(d_0i + d_0j)) over the leaves other than the root.
PolyMatrix rooted_schur_matrix(const Tree& tree, Vertex root, std::span<const Vertex> ground);

/// Exact path only: det M[Y] against D_0^k.
RootedReport rooted_exact_check(const Tree& tree, Vertex root, std::size_t k, std::size_t max_subsets = 5000,
                                std::uint64_t seed = 1);
/// Exact path plus the series path: -M = Q^T Q, R = J Q with random J, and
/// val(det R_Y) = D_0^k(Y). Throws PrecisionError when the window is too
/// small to read a valuation.
RootedReport represent_rooted(const Tree& tree, Vertex root, std::size_t k, const RootedOptions& options = {});

/// X -> val(det A[X]) with val(det A[empty]) = 0. Exploratory only.
SetFunction val_det_map(const Tree& tree);

}  // namespace arbor
