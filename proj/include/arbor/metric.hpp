#pragma once

// Four-point condition, tree-metric decomposition and realization, and the
// sign-pattern / inertia checks for matrices (tau^w_ij).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arbor/rational.hpp"
#include "arbor/tree.hpp"

namespace arbor {

/// Symmetric n x n matrix over Q u {-inf}.
class SymMatrixQ {
 public:
  explicit SymMatrixQ(std::size_t n = 0) : n_(n), entries_(n * n, ExtRational(Rational(0))) {}
  /// Row-major; throws std::invalid_argument when not square or not symmetric.
  SymMatrixQ(std::size_t n, std::vector<ExtRational> entries);

  /// Comma or whitespace separated rows; `-inf` allowed. Throws ParseError
  /// with "line N:".
  static SymMatrixQ parse_csv(std::string_view text);
  static SymMatrixQ read_csv(const std::string& path);
  std::string to_csv() const;

  std::size_t size() const { return n_; }
  const ExtRational& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, const ExtRational& value);
  bool all_finite() const;

  friend bool operator==(const SymMatrixQ&, const SymMatrixQ&) = default;

 private:
  std::size_t n_;
  std::vector<ExtRational> entries_;
};

/// Pairwise distances dist(phi(a), phi(b)).
SymMatrixQ distance_matrix(const Tree& tree, std::span<const Vertex> phi);
SymMatrixQ distance_matrix(const Tree& tree);

/// 1-based quadruple (i, j, k, l) with W_ij + W_kl > max(W_ik + W_jl, W_il + W_jk).
using Quadruple = std::array<std::size_t, 4>;

/// First violation over all quadruples with repetition, in lexicographic order.
std::optional<Quadruple> check_4pc(const SymMatrixQ& w, unsigned jobs = 1);

struct Realization {
  Tree tree;
  std::vector<Vertex> phi;  // phi[a] is the vertex of point a + 1
};

struct TreeMetricDecomposition {
  SymMatrixQ d;
  std::vector<Rational> p;
  Realization realization;
};

/// w_ij = D_ij + p_i + p_j with p_i = w_ii / 2. Throws std::invalid_argument
/// when an entry is -inf, D has a negative entry or D fails the 4PC.
TreeMetricDecomposition decompose(const SymMatrixQ& w);
SymMatrixQ recompose(const SymMatrixQ& d, std::span<const Rational> p);

class FourPointViolation : public std::invalid_argument {
 public:
  explicit FourPointViolation(const Quadruple& q);
  const Quadruple& quadruple() const { return q_; }

 private:
  Quadruple q_;
};

/// Weighted tree and embedding reproducing D exactly, by inserting points one
/// at a time at their Gromov-product attachment point. Throws
/// FourPointViolation when D is not a tree metric.
Realization realize_tree(const SymMatrixQ& d);

/// Symmetric rational matrix as a dense row-major array.
struct RationalMatrix {
  std::size_t n = 0;
  std::vector<Rational> entries;
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
  Rational& operator()(std::size_t i, std::size_t j) { return entries[i * n + j]; }
};

/// (tau^(L w_ij)) with L the lcm of the exponent denominators, so every power
/// is an integer power: tau stands for t^(1/L). -inf entries become 0.
RationalMatrix tau_matrix(const SymMatrixQ& w, const Rational& tau);

Rational det_exact(const RationalMatrix& m, std::span<const std::size_t> rows);

struct StarConditionResult {
  bool ok = true;
  bool sampled = false;
  std::size_t checked = 0;
  std::vector<std::size_t> violation;  // 1-based indices of X
  Rational det;                        // det M[X] at the violation
};

/// det M[X] >= 0 for odd |X| and <= 0 for even |X|, over all nonempty X for
/// n <= exhaustive_cap, else over `samples` random subsets.
StarConditionResult star_condition_check(const RationalMatrix& m, std::size_t exhaustive_cap = 12,
                                         std::size_t samples = 4096, std::uint64_t seed = 1);

struct Inertia {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t zeros = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Exact congruence diagonalization with symmetric pivoting.
Inertia inertia_numeric(const RationalMatrix& m);
/// Floating version; pivots with |x| <= tol * scale count as zero.
Inertia inertia_numeric(std::size_t n, std::vector<double> entries, double tol = 1e-9);

struct HppCheck {
  bool ok = true;
  bool four_point = true;
  std::optional<Quadruple> certificate;
  std::vector<std::pair<Rational, Inertia>> per_tau;
  std::optional<Rational> counterexample_tau;
};

/// At most one positive eigenvalue of (tau^f_ij) for every tau in the grid,
/// together with the 4PC on f.
HppCheck hpp_eigen_check(const SymMatrixQ& f, std::span<const Rational> taus);

}  // namespace arbor
