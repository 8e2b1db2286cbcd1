#include "arbor/minors.hpp"

#include <algorithm>
#include <stdexcept>

#include "arbor/parallel.hpp"

namespace arbor {

std::size_t SpannedForest::degree(const Tree& tree, Vertex v) const {
  std::size_t d = 0;
  for (EdgeId e : edges) d += (tree.edge(e).u == v || tree.edge(e).v == v) ? 1 : 0;
  return d;
}

PolyMatrix build_A(const Tree& tree, std::span<const Vertex> xs) {
  if (xs.empty()) throw std::invalid_argument("build_A needs a nonempty X");
  validate_vertex_set(tree, xs);
  return PolyMatrix::generate(xs.size(), Symmetry::symmetric, [&](std::size_t a, std::size_t b) {
    return ExactPoly::power(tree.dist(xs[a], xs[b]));
  });
}

namespace {

// Edge universe with endpoints renumbered into a compact local range.
struct ForestSpace {
  std::vector<EdgeId> edges;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  std::vector<Vertex> labels;  // local index -> vertex
  std::vector<bool> in_x;
  std::vector<Rational> weights;
  bool unit = true;
  std::size_t x_size = 0;

  ForestSpace(const Tree& tree, std::span<const Vertex> xs, ForestUniverse universe) {
    if (xs.empty()) throw std::invalid_argument("spanned forests need a nonempty X");
    validate_vertex_set(tree, xs);
    x_size = xs.size();
    if (universe == ForestUniverse::spanned_subtree) {
      edges = spanned_subtree(tree, xs).edges;
    } else {
      edges.resize(tree.edge_count());
      for (EdgeId e = 0; e < edges.size(); ++e) edges[e] = e;
    }
    if (edges.size() > 62) throw std::length_error("too many edges to enumerate spanned forests");
    std::vector<long> local(tree.vertex_count(), -1);
    auto id = [&](Vertex v) {
      auto& slot = local[static_cast<std::size_t>(v - tree.first_label())];
      if (slot < 0) {
        slot = static_cast<long>(labels.size());
        labels.push_back(v);
        in_x.push_back(false);
      }
      return static_cast<std::size_t>(slot);
    };
    for (Vertex x : xs) in_x[id(x)] = true;
    for (EdgeId e : edges) {
      const Edge& edge = tree.edge(e);
      ends.emplace_back(id(edge.u), id(edge.v));
      weights.push_back(edge.weight);
      if (edge.weight != 1) unit = false;
    }
  }

  std::uint64_t mask_count() const { return std::uint64_t{1} << edges.size(); }

  // Fills deg for the mask; returns false when a non-X endpoint has degree < 2.
  bool degrees(std::uint64_t mask, std::vector<unsigned>& deg) const {
    std::fill(deg.begin(), deg.end(), 0u);
    for (std::size_t b = 0; b < edges.size(); ++b) {
      if (mask >> b & 1) {
        ++deg[ends[b].first];
        ++deg[ends[b].second];
      }
    }
    for (std::size_t v = 0; v < deg.size(); ++v) {
      if (!in_x[v] && deg[v] == 1) return false;
    }
    return true;
  }
};

}  // namespace

void enumerate_spanned_forests(const Tree& tree, std::span<const Vertex> xs,
                               const std::function<void(const SpannedForest&)>& visit,
                               ForestUniverse universe) {
  const ForestSpace space(tree, xs, universe);
  std::vector<unsigned> deg(space.labels.size());
  for (std::uint64_t mask = 0; mask < space.mask_count(); ++mask) {
    if (!space.degrees(mask, deg)) continue;
    SpannedForest f;
    for (std::size_t b = 0; b < space.edges.size(); ++b) {
      if (mask >> b & 1) f.edges.push_back(space.edges[b]);
    }
    std::sort(f.edges.begin(), f.edges.end());
    for (std::size_t v = 0; v < deg.size(); ++v) {
      if (space.in_x[v] || deg[v] > 0) f.vertices.push_back(space.labels[v]);
      if (space.in_x[v] && deg[v] == 0) f.isolated.push_back(space.labels[v]);
    }
    std::sort(f.vertices.begin(), f.vertices.end());
    std::sort(f.isolated.begin(), f.isolated.end());
    f.components = f.vertices.size() - f.edges.size();
    visit(f);
  }
}

std::vector<SpannedForest> spanned_forests(const Tree& tree, std::span<const Vertex> xs,
                                           ForestUniverse universe) {
  std::vector<SpannedForest> out;
  enumerate_spanned_forests(tree, xs, [&](const SpannedForest& f) { out.push_back(f); }, universe);
  return out;
}

ExactPoly minor_formula(const Tree& tree, std::span<const Vertex> xs, const MinorOptions& options) {
  const ForestSpace space(tree, xs, options.universe);
  const std::uint64_t total = space.mask_count();
  const unsigned chunks = std::max(1u, options.jobs);
  std::vector<PolyAccumulator> partial(chunks);
  parallel_chunks(static_cast<std::size_t>(total), chunks, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<unsigned> deg(space.labels.size());
    PolyAccumulator& acc = partial[w];
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      if (!space.degrees(mask, deg)) continue;
      std::size_t vf = space.x_size;
      long product = 1;
      for (std::size_t v = 0; v < deg.size(); ++v) {
        if (!space.in_x[v] && deg[v] > 0) {
          ++vf;
          product *= static_cast<long>(deg[v]) - 1;
        }
      }
      const auto ef = static_cast<std::size_t>(__builtin_popcountll(mask));
      const std::size_t c = vf - ef;
      const long sign = (space.x_size + c) % 2 == 0 ? 1 : -1;
      Rational exponent;
      if (space.unit) {
        exponent = static_cast<long>(2 * ef);
      } else {
        for (std::size_t b = 0; b < space.edges.size(); ++b) {
          if (mask >> b & 1) exponent += space.weights[b];
        }
        exponent *= 2;
      }
      acc.add(exponent, sign * product);
    }
  });
  for (unsigned w = 1; w < chunks; ++w) partial[0].merge(partial[w]);
  return partial[0].result();
}

Term minor_leading(const Tree& tree, std::span<const Vertex> xs) {
  const SpannedSubtree sub = spanned_subtree(tree, xs);
  std::vector<Vertex> sorted_x(xs.begin(), xs.end());
  std::sort(sorted_x.begin(), sorted_x.end());
  Rational coefficient = xs.size() % 2 == 1 ? 1 : -1;
  for (Vertex v : sub.vertices) {
    if (std::binary_search(sorted_x.begin(), sorted_x.end(), v)) continue;
    long d = 0;
    for (EdgeId e : sub.edges) d += (tree.edge(e).u == v || tree.edge(e).v == v) ? 1 : 0;
    coefficient *= d - 1;
  }
  return {Rational(2 * tree.weight(sub.edges)), coefficient};
}

ExactPoly minor_oracle(const Tree& tree, std::span<const Vertex> xs, DetMethod method) {
  return det(build_A(tree, xs), method);
}

Signature signature(const Tree& tree, std::span<const Vertex> xs) {
  if (xs.empty()) throw std::invalid_argument("signature needs a nonempty X");
  validate_vertex_set(tree, xs);
  Signature out;
  int previous = 1;  // the empty minor
  for (std::size_t i = 1; i <= xs.size(); ++i) {
    Term lead = minor_leading(tree, xs.first(i));
    const int s = sgn(lead.coefficient);
    if (s == 0) throw std::logic_error("zero leading coefficient in a nested minor");
    const int expected = i % 2 == 1 ? 1 : -1;
    if (s != expected) throw std::logic_error("nested minor sign does not alternate");
    if (s != previous) ++out.negatives; else ++out.positives;
    previous = s;
    out.evidence.push_back(std::move(lead));
  }
  return out;
}

ExactPoly weighted_minor(const Tree& tree, std::span<const Vertex> phi, std::span<const Rational> p) {
  if (phi.size() != p.size()) throw std::invalid_argument("phi and p must have the same length");
  for (Vertex v : phi) {
    if (!tree.contains(v)) throw std::invalid_argument("phi maps to " + std::to_string(v) + ", not a vertex");
  }
  if (phi.empty()) return ExactPoly(1);
  std::vector<Vertex> sorted(phi.begin(), phi.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return ExactPoly();
  Rational shift;
  for (const Rational& q : p) shift += q;
  return ExactPoly::power(2 * shift) * minor_formula(tree, phi);
}

}  // namespace arbor
