#pragma once

// Cycle partitions of X and the sign-cancellation machinery behind the
// minor formula: supports, tight partitions, flips and the bracket <W_{X,F}>.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbor/poly.hpp"
#include "arbor/tree.hpp"

namespace arbor {

inline constexpr std::size_t kDefaultCycleCap = 7;

class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Cyclic sequence of distinct vertices, rotated so the smallest label is
/// first. Rotations are identified, reversals are not.
using Cycle = std::vector<Vertex>;

Cycle canonical_cycle(Cycle c);

/// Each element of X lies in exactly one cycle; cycles are canonical and
/// sorted by their first element.
struct CyclePartition {
  std::vector<Cycle> cycles;

  int sign() const;
  std::string to_string() const;  // {(1 4 2)(3)(5 6)}
  friend bool operator==(const CyclePartition&, const CyclePartition&) = default;
  friend auto operator<=>(const CyclePartition&, const CyclePartition&) = default;
};

CyclePartition make_partition(std::vector<Cycle> cycles);

/// Visits the |X|! partitions, one per permutation of X.
void enumerate_cycle_partitions(std::span<const Vertex> xs,
                                const std::function<void(const CyclePartition&)>& visit,
                                std::size_t cap = kDefaultCycleCap);

/// supp(W)(e) for every edge id: how many consecutive cycle legs use e.
std::vector<unsigned> support(const Tree& tree, const CyclePartition& w);
/// ||W|| = sum_e supp(W)(e) l(e).
Rational support_weight(const Tree& tree, const CyclePartition& w);
bool is_tight(const std::vector<unsigned>& supp);

ExactPoly det_via_cycles(const Tree& tree, std::span<const Vertex> xs, std::size_t cap = kDefaultCycleCap);
ExactPoly det_via_tight_cycles(const Tree& tree, std::span<const Vertex> xs,
                               std::size_t cap = kDefaultCycleCap);

/// Two legs crossing edge e in the same direction. A leg is (cycle index,
/// position p) for the step c[p] -> c[p+1].
struct FlipChoice {
  bool forward;  // crossing from edge(e).u towards edge(e).v
  std::size_t cycle_a, pos_a;
  std::size_t cycle_b, pos_b;
};

/// All 2 * binom(supp(e)/2, 2) flips at e.
std::vector<FlipChoice> flips_at(const Tree& tree, const CyclePartition& w, EdgeId e);
/// Merges two cycles or splits one. Throws when supp(W)(e) < 4.
CyclePartition flip(const Tree& tree, const CyclePartition& w, EdgeId e, const FlipChoice& choice);

struct CancellationReport {
  std::size_t supports = 0;         // distinct support functions seen
  std::size_t heavy_supports = 0;   // those with some l(e) >= 4
  bool balanced = true;             // |W+| = |W-| on every heavy support
  bool flips_regular = true;        // flip-degree and sign checks
  std::string failure;
};

/// Buckets all cycle partitions of X by support and checks the cancellation
/// and flip-graph regularity claims.
CancellationReport check_cancellation(const Tree& tree, std::span<const Vertex> xs,
                                      std::size_t cap = kDefaultCycleCap);

/// A forest on arbitrary vertex labels; used for the bracket, where split
/// edges introduce vertices that are not in the original tree.
class Forest {
 public:
  Forest(std::vector<Vertex> vertices, std::vector<std::pair<Vertex, Vertex>> edges);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
  std::size_t degree(Vertex v) const;
  /// Component id per vertex, ids in order of first vertex.
  std::size_t component(Vertex v) const;
  std::size_t component_count() const { return component_count_; }
  /// Edge indices on the v-w path; throws if v and w are disconnected.
  std::vector<std::size_t> path(Vertex v, Vertex w) const;

  /// Replaces edge (x, y) by x-y' and x'-y, with x', y' fresh labels.
  Forest split_edge(std::size_t edge, Vertex x_prime, Vertex y_prime) const;
  /// Star with center `center` and leaves center+1 .. center+k.
  static Forest star(Vertex center, std::size_t k);
  static Forest from_spanned(const Tree& tree, const std::vector<Vertex>& vertices, const EdgeSet& edges);

 private:
  std::size_t index(Vertex v) const;

  std::vector<Vertex> vertices_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::map<Vertex, std::size_t> index_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;  // (neighbour index, edge)
  std::vector<std::size_t> component_;
  std::size_t component_count_ = 0;
};

/// sum of sign(W) over cycle partitions of X whose cycles stay inside
/// components of F and trace every F-edge exactly twice.
long bracket_enum(const Forest& forest, std::span<const Vertex> xs, std::size_t cap = kDefaultCycleCap);
/// (-1)^(|X|+c(F)) prod_{v in V_F \ X} (deg_F(v) - 1)
long bracket_closed(const Forest& forest, std::span<const Vertex> xs);

/// <A_k>: star with k leaves, X = leaves. <B_k>: star with k-1 leaves, X = all.
long star_bracket_a(std::size_t k, std::size_t cap = kDefaultCycleCap);
long star_bracket_b(std::size_t k, std::size_t cap = kDefaultCycleCap);

}  // namespace arbor
