#include "arbor/pfaffian.hpp"

#include <algorithm>
#include <iterator>

namespace arbor {

namespace {

void require_even(std::span<const Vertex> xs) {
  if (xs.size() % 2 != 0) throw std::invalid_argument("Pfaffian undefined for odd size");
}

void require_nice(const Tree& tree, std::span<const Vertex> xs) {
  const TourCheck tour = check_tour(tree, xs);
  if (!tour.nicely_ordered) throw NotNicelyOrdered(*tour.overused);
}

bool subset_of(const EdgeSet& a, const EdgeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

PolyMatrix build_B(const Tree& tree, std::span<const Vertex> xs) {
  validate_vertex_set(tree, xs);
  return PolyMatrix::generate(xs.size(), Symmetry::skew, [&](std::size_t a, std::size_t b) {
    return ExactPoly::power(tree.dist(xs[a], xs[b]));
  });
}

ExactPoly pf_formula(const Tree& tree, std::span<const Vertex> xs) {
  require_even(xs);
  validate_vertex_set(tree, xs);
  require_nice(tree, xs);
  return ExactPoly::power(tree.weight(odd_edges(tree, xs)));
}

ExactPoly pf_oracle(const Tree& tree, std::span<const Vertex> xs) {
  require_even(xs);
  return pfaffian(build_B(tree, xs));
}

std::vector<OddPair> odd_pairing(const Tree& tree, std::span<const Vertex> xs) {
  require_even(xs);
  validate_vertex_set(tree, xs);
  require_nice(tree, xs);
  std::vector<std::size_t> alive(xs.size());
  for (std::size_t a = 0; a < alive.size(); ++a) alive[a] = a;
  std::vector<OddPair> out;
  while (!alive.empty()) {
    std::vector<Vertex> current;
    for (std::size_t a : alive) current.push_back(xs[a]);
    const EdgeSet odd = odd_edges(tree, current);
    // Some cyclically consecutive pair has its whole path inside O_X.
    std::size_t found = alive.size();
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const std::size_t b = (a + 1) % alive.size();
      if (subset_of(tree.path_edges(current[a], current[b]), odd)) {
        found = a;
        break;
      }
    }
    if (found == alive.size()) throw std::logic_error("no consecutive pair inside the odd edges");
    const std::size_t next = (found + 1) % alive.size();
    const std::size_t pa = alive[found], pb = alive[next];
    out.push_back({xs[pa], xs[pb], pa, pb});
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::max(found, next)));
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(std::min(found, next)));
  }
  return out;
}

}  // namespace arbor
