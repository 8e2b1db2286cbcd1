#pragma once

// Test-only reference implementations. They share no code paths with the
// library beyond the number types: determinants are checked pointwise by
// Gaussian elimination over Q, distances by Floyd-Warshall, odd edges by
// cutting and counting, and the tree shapes come from AHU canonical forms.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "arbor/metric.hpp"
#include "arbor/poly.hpp"
#include "arbor/tree.hpp"

namespace oracle {

using arbor::EdgeId;
using arbor::ExactPoly;
using arbor::Rational;
using arbor::Tree;
using arbor::Vertex;

inline Rational gauss_det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

/// p(tau) with tau = s^L, where L clears every exponent denominator.
inline Rational eval_exact(const ExactPoly& p, long s, std::int64_t l) {
  Rational sum = 0;
  for (const auto& term : p.terms()) {
    const Rational e = term.exponent * l;
    if (e.get_den() != 1) throw std::logic_error("eval_exact: exponent not cleared");
    const long k = e.get_num().get_si();
    Rational power = 1;
    for (long i = 0; i < std::abs(k); ++i) power *= s;
    sum += term.coefficient * (k < 0 ? Rational(1) / power : power);
  }
  return sum;
}

inline std::int64_t denominators(const std::vector<ExactPoly>& ps) {
  std::int64_t l = 1;
  for (const auto& p : ps) l = std::lcm(l, p.exponent_denominator());
  return l;
}

/// det(m) == claimed, checked at enough integer points to pin down a
/// Laurent polynomial in t^(1/L) of the possible degree span.
inline bool det_matches(const arbor::PolyMatrix& m, const ExactPoly& claimed) {
  const std::size_t n = m.size();
  std::vector<ExactPoly> all{claimed};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) all.push_back(m(i, j));
  const std::int64_t l = denominators(all);
  // Rough span bound in units of 1/L.
  Rational hi = 0, lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Rational row_hi = 0, row_lo = 0;
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (m(i, j).is_zero()) continue;
      const Rational h = m(i, j).leading_term().exponent, w = m(i, j).lowest_exponent();
      if (first || h > row_hi) row_hi = h;
      if (first || w < row_lo) row_lo = w;
      first = false;
    }
    hi += row_hi;
    lo += row_lo;
  }
  if (!claimed.is_zero()) {
    hi = std::max(hi, claimed.leading_term().exponent);
    lo = std::min(lo, claimed.lowest_exponent());
  }
  const Rational span = (hi - lo) * l;
  const long points = static_cast<long>(span.get_num().get_si() / span.get_den().get_si()) + 2;
  for (long s = 2; s < 2 + points; ++s) {
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = eval_exact(m(i, j), s, l);
    if (gauss_det(a) != eval_exact(claimed, s, l)) return false;
  }
  return true;
}

/// Pfaffian as the signed sum over perfect matchings; the sign is the
/// parity of the number of crossing pairs.
inline ExactPoly matching_pfaffian(const arbor::PolyMatrix& m) {
  const std::size_t n = m.size();
  if (n % 2) return ExactPoly();
  ExactPoly total;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&] {
    std::size_t i = 0;
    while (i < n && used[i]) ++i;
    if (i == n) {
      int crossings = 0;
      for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = 0; b < pairs.size(); ++b) {
          const auto [p, q] = pairs[a];
          const auto [r, s] = pairs[b];
          if (p < r && r < q && q < s) ++crossings;
        }
      ExactPoly term = crossings % 2 ? ExactPoly(-1) : ExactPoly(1);
      for (const auto& [p, q] : pairs) term *= m(p, q);
      total += term;
      return;
    }
    used[i] = true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      pairs.emplace_back(i, j);
      rec();
      pairs.pop_back();
      used[j] = false;
    }
    used[i] = false;
  };
  rec();
  return total;
}

inline std::vector<std::vector<Rational>> floyd(const Tree& tree) {
  const std::size_t n = tree.vertex_count();
  const Vertex base = tree.first_label();
  std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = Rational(0);
  for (const auto& e : tree.edges()) {
    d[e.u - base][e.v - base] = e.weight;
    d[e.v - base][e.u - base] = e.weight;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] && d[k][j] && (!d[i][j] || *d[i][k] + *d[k][j] < *d[i][j])) d[i][j] = *d[i][k] + *d[k][j];
  std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = *d[i][j];
  return out;
}

/// Vertices reachable from v without crossing edge `cut`.
inline std::set<Vertex> side(const Tree& tree, Vertex v, EdgeId cut) {
  std::set<Vertex> seen{v};
  std::vector<Vertex> stack{v};
  while (!stack.empty()) {
    const Vertex u = stack.back();
    stack.pop_back();
    for (EdgeId e = 0; e < tree.edge_count(); ++e) {
      if (e == cut) continue;
      const auto& ed = tree.edge(e);
      Vertex w = -1;
      if (ed.u == u) w = ed.v;
      if (ed.v == u) w = ed.u;
      if (w >= 0 && !seen.count(w)) {
        seen.insert(w);
        stack.push_back(w);
      }
    }
  }
  return seen;
}

inline std::vector<EdgeId> odd_edges(const Tree& tree, const std::vector<Vertex>& xs) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    const auto s = side(tree, tree.edge(e).u, e);
    std::size_t count = 0;
    for (Vertex x : xs) count += s.count(x);
    if (count % 2 == 1 && (xs.size() - count) % 2 == 1) out.push_back(e);
  }
  return out;
}

/// Edges of the minimal subtree: those with X on both sides.
inline std::vector<EdgeId> spanned_edges(const Tree& tree, const std::vector<Vertex>& xs) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    const auto s = side(tree, tree.edge(e).u, e);
    std::size_t count = 0;
    for (Vertex x : xs) count += s.count(x);
    if (count > 0 && count < xs.size()) out.push_back(e);
  }
  return out;
}

/// Number of spanned forests, straight from the definition over all edge
/// subsets of T.
inline std::size_t count_spanned_forests(const Tree& tree, const std::vector<Vertex>& xs) {
  const std::size_t m = tree.edge_count();
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    std::map<Vertex, int> deg;
    for (Vertex x : xs) deg[x] += 0;
    for (std::size_t e = 0; e < m; ++e) {
      if (!(mask >> e & 1)) continue;
      ++deg[tree.edge(e).u];
      ++deg[tree.edge(e).v];
    }
    bool ok = true;
    for (const auto& [v, d] : deg) {
      if (d <= 1 && std::find(xs.begin(), xs.end(), v) == xs.end()) ok = false;
    }
    count += ok;
  }
  return count;
}

/// All quadruples, no shortcuts.
inline bool satisfies_4pc(const arbor::SymMatrixQ& w) {
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (w(i, j) + w(k, l) > arbor::max(w(i, k) + w(j, l), w(i, l) + w(j, k))) return false;
  return true;
}

// ---- unlabelled trees ---------------------------------------------------

using Adjacency = std::vector<std::vector<int>>;

inline std::string ahu(const Adjacency& g, int v, int parent) {
  std::vector<std::string> kids;
  for (int w : g[v])
    if (w != parent) kids.push_back(ahu(g, w, v));
  std::sort(kids.begin(), kids.end());
  std::string s = "(";
  for (const auto& k : kids) s += k;
  return s + ")";
}

inline std::vector<int> centers(const Adjacency& g) {
  const int n = static_cast<int>(g.size());
  if (n <= 2) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::vector<int> deg(n), layer;
  for (int v = 0; v < n; ++v) {
    deg[v] = static_cast<int>(g[v].size());
    if (deg[v] <= 1) layer.push_back(v);
  }
  int left = n;
  while (left > 2) {
    left -= static_cast<int>(layer.size());
    std::vector<int> next;
    for (int v : layer)
      for (int w : g[v])
        if (--deg[w] == 1) next.push_back(w);
    layer = next;
  }
  return layer;
}

inline std::string canonical(const Adjacency& g) {
  std::string best;
  for (int c : centers(g)) {
    const std::string s = ahu(g, c, -1);
    if (best.empty() || s < best) best = s;
  }
  return best;
}

/// One unit-weight representative per isomorphism class on n vertices.
inline std::vector<Tree> unlabeled_trees(std::size_t n) {
  std::vector<Adjacency> level{Adjacency(1)};
  for (std::size_t size = 2; size <= n; ++size) {
    std::map<std::string, Adjacency> next;
    for (const auto& g : level) {
      for (int v = 0; v < static_cast<int>(g.size()); ++v) {
        Adjacency h = g;
        h.emplace_back();
        const int w = static_cast<int>(h.size()) - 1;
        h[v].push_back(w);
        h[w].push_back(v);
        next.emplace(canonical(h), h);
      }
    }
    level.clear();
    for (auto& [key, g] : next) level.push_back(std::move(g));
  }
  std::vector<Tree> out;
  for (const auto& g : level) {
    std::vector<arbor::Edge> edges;
    for (int v = 0; v < static_cast<int>(g.size()); ++v)
      for (int w : g[v])
        if (v < w) edges.push_back({v + 1, w + 1, Rational(1)});
    out.emplace_back(n, edges);
  }
  return out;
}

/// Same shape, weights p/q with p in 1..9, q in 1..4.
inline Tree reweighted(const Tree& tree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<arbor::Edge> edges = tree.edges();
  for (auto& e : edges) {
    e.weight = Rational(static_cast<long>(rng() % 9 + 1), static_cast<unsigned long>(rng() % 4 + 1));
    e.weight.canonicalize();
  }
  return Tree(tree.vertex_count(), edges, tree.first_label());
}

inline std::vector<std::vector<Vertex>> subsets(const std::vector<Vertex>& ground, bool nonempty = true) {
  std::vector<std::vector<Vertex>> out;
  for (std::uint64_t mask = nonempty ? 1 : 0; mask < (std::uint64_t{1} << ground.size()); ++mask) {
    std::vector<Vertex> s;
    for (std::size_t b = 0; b < ground.size(); ++b)
      if (mask >> b & 1) s.push_back(ground[b]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace oracle
