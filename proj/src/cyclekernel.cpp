#include "arbor/cyclekernel.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace arbor {

Cycle canonical_cycle(Cycle c) {
  if (c.empty()) throw std::invalid_argument("empty cycle");
  std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
  return c;
}

CyclePartition make_partition(std::vector<Cycle> cycles) {
  CyclePartition w;
  for (auto& c : cycles) w.cycles.push_back(canonical_cycle(std::move(c)));
  std::sort(w.cycles.begin(), w.cycles.end(), [](const Cycle& a, const Cycle& b) { return a.front() < b.front(); });
  return w;
}

int CyclePartition::sign() const {
  int s = 1;
  for (const Cycle& c : cycles) {
    if (c.size() % 2 == 0) s = -s;
  }
  return s;
}

std::string CyclePartition::to_string() const {
  std::string out = "{";
  for (const Cycle& c : cycles) {
    out += "(";
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (a > 0) out += " ";
      out += std::to_string(c[a]);
    }
    out += ")";
  }
  return out + "}";
}

namespace {

void check_cap(std::size_t size, std::size_t cap) {
  if (size > cap) {
    throw CapExceeded("|X| = " + std::to_string(size) + " exceeds the cycle enumeration cap " +
                      std::to_string(cap));
  }
}

void require_distinct(std::span<const Vertex> xs) {
  std::vector<Vertex> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw std::invalid_argument("X has repeated vertices");
}

// Cycles of the permutation a -> perm[a] over the ordered set xs.
std::vector<Cycle> cycles_of(std::span<const Vertex> xs, const std::vector<std::size_t>& perm) {
  std::vector<Cycle> out;
  std::vector<bool> seen(xs.size(), false);
  for (std::size_t a = 0; a < xs.size(); ++a) {
    if (seen[a]) continue;
    Cycle c;
    for (std::size_t b = a; !seen[b]; b = perm[b]) {
      seen[b] = true;
      c.push_back(xs[b]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

template <class Fn>
void for_each_leg(const CyclePartition& w, Fn&& fn) {
  for (std::size_t ci = 0; ci < w.cycles.size(); ++ci) {
    const Cycle& c = w.cycles[ci];
    if (c.size() < 2) continue;
    for (std::size_t p = 0; p < c.size(); ++p) fn(ci, p, c[p], c[(p + 1) % c.size()]);
  }
}

bool on_u_side(const Tree& tree, EdgeId e, Vertex v) {
  return tree.below(e, v) == (tree.child(e) == tree.edge(e).u);
}

// +1 when the leg a -> b crosses e from u to v, -1 for v to u, 0 otherwise.
int crossing(const Tree& tree, EdgeId e, Vertex a, Vertex b) {
  const bool ua = on_u_side(tree, e, a), ub = on_u_side(tree, e, b);
  if (ua == ub) return 0;
  return ua ? 1 : -1;
}

long binom2(long m) { return m * (m - 1) / 2; }

}  // namespace

void enumerate_cycle_partitions(std::span<const Vertex> xs,
                                const std::function<void(const CyclePartition&)>& visit, std::size_t cap) {
  check_cap(xs.size(), cap);
  require_distinct(xs);
  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    visit(make_partition(cycles_of(xs, perm)));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<unsigned> support(const Tree& tree, const CyclePartition& w) {
  std::vector<unsigned> supp(tree.edge_count(), 0);
  for_each_leg(w, [&](std::size_t, std::size_t, Vertex a, Vertex b) {
    for (EdgeId e : tree.path_edges(a, b)) ++supp[e];
  });
  return supp;
}

Rational support_weight(const Tree& tree, const CyclePartition& w) {
  Rational total;
  for_each_leg(w, [&](std::size_t, std::size_t, Vertex a, Vertex b) { total += tree.dist(a, b); });
  return total;
}

bool is_tight(const std::vector<unsigned>& supp) {
  return std::all_of(supp.begin(), supp.end(), [](unsigned s) { return s == 0 || s == 2; });
}

ExactPoly det_via_cycles(const Tree& tree, std::span<const Vertex> xs, std::size_t cap) {
  validate_vertex_set(tree, xs);
  PolyAccumulator acc;
  enumerate_cycle_partitions(xs, [&](const CyclePartition& w) { acc.add(support_weight(tree, w), w.sign()); }, cap);
  return acc.result();
}

ExactPoly det_via_tight_cycles(const Tree& tree, std::span<const Vertex> xs, std::size_t cap) {
  validate_vertex_set(tree, xs);
  PolyAccumulator acc;
  enumerate_cycle_partitions(xs, [&](const CyclePartition& w) {
    if (is_tight(support(tree, w))) acc.add(support_weight(tree, w), w.sign());
  }, cap);
  return acc.result();
}

std::vector<FlipChoice> flips_at(const Tree& tree, const CyclePartition& w, EdgeId e) {
  std::vector<std::pair<std::size_t, std::size_t>> forward, backward;
  for_each_leg(w, [&](std::size_t ci, std::size_t p, Vertex a, Vertex b) {
    const int dir = crossing(tree, e, a, b);
    if (dir > 0) forward.emplace_back(ci, p);
    if (dir < 0) backward.emplace_back(ci, p);
  });
  std::vector<FlipChoice> out;
  for (bool fwd : {true, false}) {
    const auto& legs = fwd ? forward : backward;
    for (std::size_t a = 0; a < legs.size(); ++a) {
      for (std::size_t b = a + 1; b < legs.size(); ++b) {
        out.push_back({fwd, legs[a].first, legs[a].second, legs[b].first, legs[b].second});
      }
    }
  }
  return out;
}

CyclePartition flip(const Tree& tree, const CyclePartition& w, EdgeId e, const FlipChoice& choice) {
  if (support(tree, w).at(e) < 4) throw std::invalid_argument("flip needs supp(W)(e) >= 4");
  const int want = choice.forward ? 1 : -1;
  auto leg_ok = [&](std::size_t ci, std::size_t p) {
    if (ci >= w.cycles.size() || w.cycles[ci].size() < 2 || p >= w.cycles[ci].size()) return false;
    const Cycle& c = w.cycles[ci];
    return crossing(tree, e, c[p], c[(p + 1) % c.size()]) == want;
  };
  if (!leg_ok(choice.cycle_a, choice.pos_a) || !leg_ok(choice.cycle_b, choice.pos_b) ||
      (choice.cycle_a == choice.cycle_b && choice.pos_a == choice.pos_b)) {
    throw std::invalid_argument("flip choice does not name two legs crossing e in one direction");
  }
  std::vector<Cycle> cycles;
  for (std::size_t ci = 0; ci < w.cycles.size(); ++ci) {
    if (ci != choice.cycle_a && ci != choice.cycle_b) cycles.push_back(w.cycles[ci]);
  }
  if (choice.cycle_a != choice.cycle_b) {
    const Cycle& c = w.cycles[choice.cycle_a];
    const Cycle& d = w.cycles[choice.cycle_b];
    const std::size_t i = choice.pos_a, j = choice.pos_b;
    Cycle merged(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i + 1));
    for (std::size_t s = 1; s <= d.size(); ++s) merged.push_back(d[(j + s) % d.size()]);
    merged.insert(merged.end(), c.begin() + static_cast<std::ptrdiff_t>(i + 1), c.end());
    cycles.push_back(std::move(merged));
  } else {
    const Cycle& c = w.cycles[choice.cycle_a];
    const std::size_t a = std::min(choice.pos_a, choice.pos_b), b = std::max(choice.pos_a, choice.pos_b);
    Cycle first(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(a + 1));
    first.insert(first.end(), c.begin() + static_cast<std::ptrdiff_t>(b + 1), c.end());
    Cycle second(c.begin() + static_cast<std::ptrdiff_t>(a + 1), c.begin() + static_cast<std::ptrdiff_t>(b + 1));
    cycles.push_back(std::move(first));
    cycles.push_back(std::move(second));
  }
  return make_partition(std::move(cycles));
}

CancellationReport check_cancellation(const Tree& tree, std::span<const Vertex> xs, std::size_t cap) {
  validate_vertex_set(tree, xs);
  std::map<std::vector<unsigned>, std::vector<CyclePartition>> buckets;
  enumerate_cycle_partitions(xs, [&](const CyclePartition& w) { buckets[support(tree, w)].push_back(w); }, cap);
  CancellationReport report;
  report.supports = buckets.size();
  for (const auto& [supp, members] : buckets) {
    if (*std::max_element(supp.begin(), supp.end(), [](unsigned a, unsigned b) { return a < b; }) < 4) continue;
    ++report.heavy_supports;
    long balance = 0;
    for (const auto& w : members) balance += w.sign();
    if (balance != 0 && report.balanced) {
      report.balanced = false;
      report.failure = "unbalanced support bucket containing " + members.front().to_string();
    }
    const std::set<CyclePartition> bucket(members.begin(), members.end());
    for (EdgeId e = 0; e < supp.size(); ++e) {
      if (supp[e] < 4) continue;
      const long expected = 2 * binom2(static_cast<long>(supp[e]) / 2);
      for (const auto& w : members) {
        const auto choices = flips_at(tree, w, e);
        std::set<CyclePartition> images;
        bool ok = static_cast<long>(choices.size()) == expected;
        for (const auto& choice : choices) {
          CyclePartition image = flip(tree, w, e, choice);
          ok = ok && image.sign() == -w.sign() && bucket.count(image) == 1;
          // The flip is undone by some flip of the image at the same edge.
          bool undone = false;
          for (const auto& back : flips_at(tree, image, e)) {
            if (flip(tree, image, e, back) == w) {
              undone = true;
              break;
            }
          }
          ok = ok && undone;
          images.insert(std::move(image));
        }
        ok = ok && static_cast<long>(images.size()) == expected;
        if (!ok && report.flips_regular) {
          report.flips_regular = false;
          report.failure = "flip regularity fails at edge " + std::to_string(e) + " for " + w.to_string();
        }
      }
    }
  }
  return report;
}

Forest::Forest(std::vector<Vertex> vertices, std::vector<std::pair<Vertex, Vertex>> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  for (std::size_t a = 0; a < vertices_.size(); ++a) {
    if (!index_.emplace(vertices_[a], a).second) {
      throw std::invalid_argument("forest vertex " + std::to_string(vertices_[a]) + " repeated");
    }
  }
  adj_.resize(vertices_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const std::size_t a = index(edges_[e].first), b = index(edges_[e].second);
    if (a == b) throw std::invalid_argument("forest self-loop");
    adj_[a].emplace_back(b, e);
    adj_[b].emplace_back(a, e);
  }
  component_.assign(vertices_.size(), vertices_.size());
  for (std::size_t s = 0; s < vertices_.size(); ++s) {
    if (component_[s] != vertices_.size()) continue;
    std::queue<std::size_t> q;
    q.push(s);
    component_[s] = component_count_;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (auto [w, e] : adj_[v]) {
        if (component_[w] == vertices_.size()) {
          component_[w] = component_count_;
          q.push(w);
        }
      }
    }
    ++component_count_;
  }
  if (vertices_.size() - component_count_ != edges_.size()) throw std::invalid_argument("graph has a cycle");
}

std::size_t Forest::index(Vertex v) const {
  auto it = index_.find(v);
  if (it == index_.end()) throw std::out_of_range("vertex " + std::to_string(v) + " not in forest");
  return it->second;
}

std::size_t Forest::degree(Vertex v) const { return adj_[index(v)].size(); }

std::size_t Forest::component(Vertex v) const { return component_[index(v)]; }

std::vector<std::size_t> Forest::path(Vertex v, Vertex w) const {
  const std::size_t s = index(v), t = index(w);
  if (component_[s] != component_[t]) throw std::invalid_argument("vertices in different components");
  std::vector<std::pair<std::size_t, std::size_t>> from(vertices_.size(), {vertices_.size(), 0});
  std::queue<std::size_t> q;
  q.push(s);
  from[s] = {s, 0};
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    for (auto [y, e] : adj_[x]) {
      if (from[y].first == vertices_.size()) {
        from[y] = {x, e};
        q.push(y);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t x = t; x != s; x = from[x].first) out.push_back(from[x].second);
  std::sort(out.begin(), out.end());
  return out;
}

Forest Forest::split_edge(std::size_t edge, Vertex x_prime, Vertex y_prime) const {
  auto [x, y] = edges_.at(edge);
  std::vector<Vertex> vs = vertices_;
  vs.push_back(x_prime);
  vs.push_back(y_prime);
  std::vector<std::pair<Vertex, Vertex>> es;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (e != edge) es.push_back(edges_[e]);
  }
  es.emplace_back(x, y_prime);
  es.emplace_back(x_prime, y);
  return Forest(std::move(vs), std::move(es));
}

Forest Forest::star(Vertex center, std::size_t k) {
  std::vector<Vertex> vs{center};
  std::vector<std::pair<Vertex, Vertex>> es;
  for (std::size_t a = 1; a <= k; ++a) {
    vs.push_back(center + static_cast<Vertex>(a));
    es.emplace_back(center, center + static_cast<Vertex>(a));
  }
  return Forest(std::move(vs), std::move(es));
}

Forest Forest::from_spanned(const Tree& tree, const std::vector<Vertex>& vertices, const EdgeSet& edges) {
  std::vector<std::pair<Vertex, Vertex>> es;
  for (EdgeId e : edges) es.emplace_back(tree.edge(e).u, tree.edge(e).v);
  return Forest(vertices, std::move(es));
}

namespace {

void require_spanned(const Forest& forest, std::span<const Vertex> xs) {
  require_distinct(xs);
  std::set<Vertex> in_x(xs.begin(), xs.end());
  for (Vertex x : xs) forest.degree(x);  // throws for vertices outside F
  for (Vertex v : forest.vertices()) {
    if (forest.degree(v) <= 1 && !in_x.count(v)) {
      throw std::invalid_argument("forest is not spanned by X: vertex " + std::to_string(v) + " is a leaf outside X");
    }
  }
}

}  // namespace

long bracket_enum(const Forest& forest, std::span<const Vertex> xs, std::size_t cap) {
  check_cap(xs.size(), cap);
  require_spanned(forest, xs);
  // Candidate cycle sets per component, each with its per-edge trace counts.
  std::map<std::size_t, std::vector<Vertex>> groups;
  for (Vertex x : xs) groups[forest.component(x)].push_back(x);
  struct Option {
    int sign;
    std::vector<unsigned> traces;
  };
  std::vector<std::vector<Option>> options;
  for (const auto& [comp, members] : groups) {
    std::vector<Option> opts;
    std::vector<std::size_t> perm(members.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      const CyclePartition w = make_partition(cycles_of(members, perm));
      Option o{w.sign(), std::vector<unsigned>(forest.edges().size(), 0)};
      for_each_leg(w, [&](std::size_t, std::size_t, Vertex a, Vertex b) {
        for (std::size_t e : forest.path(a, b)) ++o.traces[e];
      });
      opts.push_back(std::move(o));
    } while (std::next_permutation(perm.begin(), perm.end()));
    options.push_back(std::move(opts));
  }
  long total = 0;
  std::vector<std::size_t> pick(options.size(), 0);
  std::vector<unsigned> traces(forest.edges().size());
  while (true) {
    std::fill(traces.begin(), traces.end(), 0u);
    int sign = 1;
    for (std::size_t g = 0; g < options.size(); ++g) {
      const Option& o = options[g][pick[g]];
      sign *= o.sign;
      for (std::size_t e = 0; e < traces.size(); ++e) traces[e] += o.traces[e];
    }
    if (std::all_of(traces.begin(), traces.end(), [](unsigned c) { return c == 2; })) total += sign;
    std::size_t g = 0;
    while (g < pick.size() && ++pick[g] == options[g].size()) pick[g++] = 0;
    if (g == pick.size()) break;
  }
  return total;
}

long bracket_closed(const Forest& forest, std::span<const Vertex> xs) {
  require_spanned(forest, xs);
  std::set<Vertex> in_x(xs.begin(), xs.end());
  long value = (xs.size() + forest.component_count()) % 2 == 0 ? 1 : -1;
  for (Vertex v : forest.vertices()) {
    if (!in_x.count(v)) value *= static_cast<long>(forest.degree(v)) - 1;
  }
  return value;
}

long star_bracket_a(std::size_t k, std::size_t cap) {
  if (k < 1) throw std::invalid_argument("<A_k> needs k >= 1");
  const Forest f = Forest::star(0, k);
  std::vector<Vertex> xs(k);
  std::iota(xs.begin(), xs.end(), 1);
  return bracket_enum(f, xs, cap);
}

long star_bracket_b(std::size_t k, std::size_t cap) {
  if (k < 1) throw std::invalid_argument("<B_k> needs k >= 1");
  const Forest f = Forest::star(0, k - 1);
  std::vector<Vertex> xs(k);
  std::iota(xs.begin(), xs.end(), 0);
  return bracket_enum(f, xs, cap);
}

}  // namespace arbor
