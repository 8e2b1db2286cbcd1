#pragma once

// Principal minors of the tree-distance matrix A = (t^d_ij): the forest-sum
// formula, its leading term, the determinant oracle and the signature.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "arbor/poly.hpp"
#include "arbor/tree.hpp"

namespace arbor {

/// A subgraph F of T spanned by X: X is contained in V_F and every vertex of
/// degree <= 1 in F lies in X.
struct SpannedForest {
  EdgeSet edges;
  VertexSet isolated;   // X minus the endpoints of edges
  VertexSet vertices;   // V_F, increasing
  std::size_t components = 0;  // c(F), isolated vertices included

  std::size_t degree(const Tree& tree, Vertex v) const;
};

/// Symmetric |X| x |X| matrix (t^dist(x_a, x_b)).
PolyMatrix build_A(const Tree& tree, std::span<const Vertex> xs);

enum class ForestUniverse {
  spanned_subtree,  // edge subsets of E(T_X)
  all_edges,        // edge subsets of E(T); for cross-checking only
};

/// Streams every spanned forest exactly once, in increasing edge-mask order.
void enumerate_spanned_forests(const Tree& tree, std::span<const Vertex> xs,
                               const std::function<void(const SpannedForest&)>& visit,
                               ForestUniverse universe = ForestUniverse::spanned_subtree);
std::vector<SpannedForest> spanned_forests(const Tree& tree, std::span<const Vertex> xs,
                                           ForestUniverse universe = ForestUniverse::spanned_subtree);

struct MinorOptions {
  ForestUniverse universe = ForestUniverse::spanned_subtree;
  unsigned jobs = 1;
};

/// sum_F (-1)^(|X|+c(F)) t^(2 l(E_F)) prod_{v in V_F \ X} (deg_F(v) - 1)
ExactPoly minor_formula(const Tree& tree, std::span<const Vertex> xs, const MinorOptions& options = {});

/// Leading term of minor_formula, read off T_X directly.
Term minor_leading(const Tree& tree, std::span<const Vertex> xs);

/// det build_A(T, X).
ExactPoly minor_oracle(const Tree& tree, std::span<const Vertex> xs, DetMethod method = DetMethod::bareiss);

struct Signature {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Leading terms of det A[x_1..x_i], i = 1..|X|.
  std::vector<Term> evidence;
};

/// Inertia of A[X] for large t from the signs of the nested leading minors.
Signature signature(const Tree& tree, std::span<const Vertex> xs);

/// det (t^(w_ij)) with w_ij = dist(phi(i), phi(j)) + p_i + p_j.
/// Zero when phi repeats a vertex; throws when phi leaves the tree.
ExactPoly weighted_minor(const Tree& tree, std::span<const Vertex> phi, std::span<const Rational> p);

}  // namespace arbor
