#pragma once

// Pfaffians of B = (b_ij), b_ij = -b_ji = t^d_ij (i < j in the order of X),
// the odd-edge closed form and the pairing of X along odd edges.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "arbor/poly.hpp"
#include "arbor/tree.hpp"

namespace arbor {

class NotNicelyOrdered : public std::invalid_argument {
 public:
  explicit NotNicelyOrdered(EdgeId edge)
      : std::invalid_argument("X is not nicely ordered: edge " + std::to_string(edge) +
                              " is traversed more than twice"),
        edge_(edge) {}
  EdgeId edge() const { return edge_; }

 private:
  EdgeId edge_;
};

/// B[X] for the given ordering of X.
PolyMatrix build_B(const Tree& tree, std::span<const Vertex> xs);

/// t^(l(O_X)). Requires even |X| and a nicely-ordered X (NotNicelyOrdered).
ExactPoly pf_formula(const Tree& tree, std::span<const Vertex> xs);

/// Pf B[X] by first-row expansion, any ordering.
ExactPoly pf_oracle(const Tree& tree, std::span<const Vertex> xs);

struct OddPair {
  Vertex i;
  Vertex j;
  std::size_t pos_i;  // 0-based positions in the input ordering
  std::size_t pos_j;
};

/// Perfect pairing of a nicely-ordered even X whose paths P_ij partition O_X,
/// each pair joining positions of opposite parity. Pairs come out in the
/// order they are removed.
std::vector<OddPair> odd_pairing(const Tree& tree, std::span<const Vertex> xs);

}  // namespace arbor
