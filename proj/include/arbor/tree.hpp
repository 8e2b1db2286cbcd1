#pragma once

// Vertex-labelled trees with positive rational edge weights: distances,
// paths, spanned subtrees, odd edges and nicely-ordered tours.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arbor/rational.hpp"

namespace arbor {

using Vertex = int;
using EdgeId = std::size_t;

struct Edge {
  Vertex u;
  Vertex v;
  Rational weight{1};
};

/// Ordered sequence of distinct vertex labels. Order matters for Pfaffians.
using VertexSet = std::vector<Vertex>;
/// Edge ids in increasing order.
using EdgeSet = std::vector<EdgeId>;

enum class WeightMode { unit, random_rational };

/// Vertices are labelled first_label .. first_label + n - 1 (first_label is
/// 1 by default; 0 is used when a root vertex 0 is part of the tree).
/// Validated at construction and immutable afterwards.
class Tree {
 public:
  Tree(std::size_t n, std::vector<Edge> edges, Vertex first_label = 1);

  /// Text format: a line `n`, then n-1 lines `u v [weight]`. Weights are
  /// decimals or p/q. Blank lines and `#` comments are ignored. Labels are
  /// 0-based when any label is 0, else 1-based. Throws ParseError with
  /// "line N:" on malformed input, cycles or bad labels.
  static Tree parse(std::string_view text);
  static Tree read_file(const std::filesystem::path& path);
  std::string to_text() const;

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  Vertex first_label() const { return base_; }
  bool contains(Vertex v) const { return v >= base_ && v < base_ + static_cast<Vertex>(n_); }
  std::vector<Vertex> vertices() const;
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  bool unit_weights() const { return unit_; }

  std::size_t degree(Vertex v) const;
  /// Degree <= 1 vertices in increasing label order.
  std::vector<Vertex> leaves() const;
  /// (neighbour, edge id) pairs, neighbours in increasing label order.
  const std::vector<std::pair<Vertex, EdgeId>>& neighbors(Vertex v) const;

  /// Weighted path length; throws std::out_of_range on invalid vertices.
  Rational dist(Vertex i, Vertex j) const;
  /// Number of edges on the path.
  std::size_t hops(Vertex i, Vertex j) const;
  /// Edge set of the unique i-j path (empty for i == j).
  EdgeSet path_edges(Vertex i, Vertex j) const;
  Rational weight(std::span<const EdgeId> edges) const;

  /// True iff v lies on the child side of e (rooted at first_label()).
  bool below(EdgeId e, Vertex v) const;
  /// The endpoint of e farther from the root.
  Vertex child(EdgeId e) const { return child_[e]; }

  void require_vertex(Vertex v) const;

 private:
  std::size_t index(Vertex v) const { return static_cast<std::size_t>(v - base_); }
  Vertex lca(Vertex a, Vertex b) const;

  std::size_t n_;
  Vertex base_;
  bool unit_ = true;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<Vertex, EdgeId>>> adj_;
  std::vector<Vertex> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<std::size_t> depth_;
  std::vector<Rational> wdepth_;
  std::vector<std::size_t> tin_, tout_;
  std::vector<Vertex> child_;
};

/// Throws std::invalid_argument on out-of-range or repeated labels.
void validate_vertex_set(const Tree& tree, std::span<const Vertex> xs);

struct SpannedSubtree {
  std::vector<Vertex> vertices;  // increasing label order
  EdgeSet edges;
};

/// Minimal subtree containing X. Throws on empty X.
SpannedSubtree spanned_subtree(const Tree& tree, std::span<const Vertex> xs);

/// Edges whose removal leaves an odd number of X-vertices on both sides.
EdgeSet odd_edges(const Tree& tree, std::span<const Vertex> xs);

struct TourCheck {
  bool nicely_ordered = true;
  /// Traversal count of every edge by the tour x1 -> x2 -> ... -> xk -> x1.
  std::vector<unsigned> traversals;
  /// First edge traversed more than twice, if any.
  std::optional<EdgeId> overused;
};

TourCheck check_tour(const Tree& tree, std::span<const Vertex> xs);
inline bool is_nicely_ordered(const Tree& tree, std::span<const Vertex> xs) {
  return check_tour(tree, xs).nicely_ordered;
}

/// Reorders X by first-visit time of a depth-first walk from root
/// (default: the smallest label), children in increasing label order.
VertexSet nice_order(const Tree& tree, std::span<const Vertex> xs,
                     std::optional<Vertex> root = std::nullopt);

/// Uniform labelled tree on 1..n from a random Prüfer sequence;
/// deterministic for a given (n, seed, mode).
Tree random_tree(std::size_t n, std::uint64_t seed, WeightMode mode = WeightMode::unit);

}  // namespace arbor
