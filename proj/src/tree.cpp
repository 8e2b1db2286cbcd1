#include "arbor/tree.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace arbor {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

ParseError line_error(std::size_t line, const std::string& what) {
  return ParseError("line " + std::to_string(line) + ": " + what);
}

long parse_label(std::string_view token, std::size_t line) {
  if (token.empty() || token.size() > 9) throw line_error(line, "bad vertex label '" + std::string(token) + "'");
  long value = 0;
  for (char c : token) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw line_error(line, "bad vertex label '" + std::string(token) + "'");
    }
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

Tree::Tree(std::size_t n, std::vector<Edge> edges, Vertex first_label)
    : n_(n), base_(first_label), edges_(std::move(edges)) {
  if (n == 0) throw std::invalid_argument("tree needs at least one vertex");
  if (edges_.size() != n - 1) {
    throw std::invalid_argument("tree on " + std::to_string(n) + " vertices needs " +
                                std::to_string(n - 1) + " edges, got " + std::to_string(edges_.size()));
  }
  adj_.resize(n);
  DisjointSets sets(n);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (!contains(edge.u) || !contains(edge.v)) {
      throw std::invalid_argument("edge " + std::to_string(edge.u) + "-" + std::to_string(edge.v) +
                                  " has a label outside " + std::to_string(base_) + ".." +
                                  std::to_string(base_ + static_cast<Vertex>(n) - 1));
    }
    if (edge.weight <= 0) throw std::invalid_argument("edge weights must be positive");
    if (!sets.unite(index(edge.u), index(edge.v))) {
      throw std::invalid_argument("edge " + std::to_string(edge.u) + "-" + std::to_string(edge.v) +
                                  " closes a cycle");
    }
    if (edge.weight != 1) unit_ = false;
    adj_[index(edge.u)].emplace_back(edge.v, e);
    adj_[index(edge.v)].emplace_back(edge.u, e);
  }
  for (auto& list : adj_) std::sort(list.begin(), list.end());

  // Root at base_ and record parent links, depths and Euler intervals.
  parent_.assign(n, base_ - 1);
  parent_edge_.assign(n, 0);
  depth_.assign(n, 0);
  wdepth_.assign(n, Rational(0));
  tin_.assign(n, 0);
  tout_.assign(n, 0);
  child_.assign(edges_.size(), base_);
  std::size_t clock = 0;
  std::vector<std::pair<Vertex, std::size_t>> stack{{base_, 0}};
  tin_[0] = clock++;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& nbrs = adj_[index(v)];
    if (next == nbrs.size()) {
      tout_[index(v)] = clock;
      stack.pop_back();
      continue;
    }
    auto [w, e] = nbrs[next++];
    if (w == parent_[index(v)] && index(v) != 0 && e == parent_edge_[index(v)]) continue;
    const std::size_t wi = index(w);
    parent_[wi] = v;
    parent_edge_[wi] = e;
    depth_[wi] = depth_[index(v)] + 1;
    wdepth_[wi] = wdepth_[index(v)] + edges_[e].weight;
    child_[e] = w;
    tin_[wi] = clock++;
    stack.emplace_back(w, 0);
  }
}

Tree Tree::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> n;
  struct Pending {
    long u, v;
    Rational w;
    std::size_t line;
  };
  std::vector<Pending> pending;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (!n) {
      if (tokens.size() != 1) throw line_error(line_no, "expected the vertex count");
      long count = parse_label(tokens[0], line_no);
      if (count < 1) throw line_error(line_no, "vertex count must be positive");
      n = static_cast<std::size_t>(count);
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 3) throw line_error(line_no, "expected 'u v [weight]'");
    if (pending.size() + 1 >= *n) throw line_error(line_no, "more than n-1 edges");
    Pending p{parse_label(tokens[0], line_no), parse_label(tokens[1], line_no), Rational(1), line_no};
    if (tokens.size() == 3) {
      try {
        p.w = parse_rational(tokens[2]);
      } catch (const ParseError& err) {
        throw line_error(line_no, err.what());
      }
      if (p.w <= 0) throw line_error(line_no, "edge weight must be positive");
    }
    pending.push_back(std::move(p));
  }
  if (!n) throw line_error(line_no + 1, "missing vertex count");
  if (pending.size() + 1 != *n) {
    throw line_error(line_no + 1, "expected " + std::to_string(*n - 1) + " edges, found " +
                                      std::to_string(pending.size()) + " (graph is disconnected)");
  }
  const bool zero_based = std::any_of(pending.begin(), pending.end(),
                                      [](const Pending& p) { return p.u == 0 || p.v == 0; });
  const long lo = zero_based ? 0 : 1;
  const long hi = lo + static_cast<long>(*n) - 1;
  DisjointSets sets(*n);
  std::vector<Edge> edges;
  for (const Pending& p : pending) {
    for (long x : {p.u, p.v}) {
      if (x < lo || x > hi) {
        throw line_error(p.line, "vertex " + std::to_string(x) + " outside " + std::to_string(lo) + ".." +
                                     std::to_string(hi));
      }
    }
    if (p.u == p.v) throw line_error(p.line, "self-loop at vertex " + std::to_string(p.u));
    if (!sets.unite(static_cast<std::size_t>(p.u - lo), static_cast<std::size_t>(p.v - lo))) {
      throw line_error(p.line, "edge " + std::to_string(p.u) + "-" + std::to_string(p.v) + " closes a cycle");
    }
    edges.push_back({static_cast<Vertex>(p.u), static_cast<Vertex>(p.v), p.w});
  }
  return Tree(*n, std::move(edges), static_cast<Vertex>(lo));
}

Tree Tree::read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open tree file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string Tree::to_text() const {
  std::string out = std::to_string(n_) + "\n";
  for (const Edge& e : edges_) {
    out += std::to_string(e.u) + " " + std::to_string(e.v);
    if (e.weight != 1) out += " " + e.weight.get_str();
    out += "\n";
  }
  return out;
}

std::vector<Vertex> Tree::vertices() const {
  std::vector<Vertex> out(n_);
  std::iota(out.begin(), out.end(), base_);
  return out;
}

void Tree::require_vertex(Vertex v) const {
  if (!contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " not in tree");
}

std::size_t Tree::degree(Vertex v) const {
  require_vertex(v);
  return adj_[index(v)].size();
}

std::vector<Vertex> Tree::leaves() const {
  std::vector<Vertex> out;
  for (Vertex v : vertices()) {
    if (adj_[index(v)].size() <= 1) out.push_back(v);
  }
  return out;
}

const std::vector<std::pair<Vertex, EdgeId>>& Tree::neighbors(Vertex v) const {
  require_vertex(v);
  return adj_[index(v)];
}

Vertex Tree::lca(Vertex a, Vertex b) const {
  while (depth_[index(a)] > depth_[index(b)]) a = parent_[index(a)];
  while (depth_[index(b)] > depth_[index(a)]) b = parent_[index(b)];
  while (a != b) {
    a = parent_[index(a)];
    b = parent_[index(b)];
  }
  return a;
}

Rational Tree::dist(Vertex i, Vertex j) const {
  require_vertex(i);
  require_vertex(j);
  const Vertex c = lca(i, j);
  return wdepth_[index(i)] + wdepth_[index(j)] - 2 * wdepth_[index(c)];
}

std::size_t Tree::hops(Vertex i, Vertex j) const {
  require_vertex(i);
  require_vertex(j);
  const Vertex c = lca(i, j);
  return depth_[index(i)] + depth_[index(j)] - 2 * depth_[index(c)];
}

EdgeSet Tree::path_edges(Vertex i, Vertex j) const {
  require_vertex(i);
  require_vertex(j);
  const Vertex c = lca(i, j);
  EdgeSet out;
  for (Vertex x : {i, j}) {
    while (x != c) {
      out.push_back(parent_edge_[index(x)]);
      x = parent_[index(x)];
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational Tree::weight(std::span<const EdgeId> edges) const {
  Rational total(0);
  for (EdgeId e : edges) total += edges_.at(e).weight;
  return total;
}

bool Tree::below(EdgeId e, Vertex v) const {
  const std::size_t c = index(child_[e]);
  const std::size_t x = index(v);
  return tin_[c] <= tin_[x] && tin_[x] < tout_[c];
}

void validate_vertex_set(const Tree& tree, std::span<const Vertex> xs) {
  std::vector<Vertex> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!tree.contains(sorted[i])) {
      throw std::invalid_argument("vertex " + std::to_string(sorted[i]) + " not in tree");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("vertex " + std::to_string(sorted[i]) + " repeated");
    }
  }
}

namespace {

// Number of X-vertices on the child side of each edge.
std::vector<std::size_t> below_counts(const Tree& tree, std::span<const Vertex> xs) {
  std::vector<std::size_t> counts(tree.edge_count(), 0);
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    for (Vertex x : xs) counts[e] += tree.below(e, x) ? 1 : 0;
  }
  return counts;
}

}  // namespace

SpannedSubtree spanned_subtree(const Tree& tree, std::span<const Vertex> xs) {
  if (xs.empty()) throw std::invalid_argument("spanned_subtree of an empty vertex set");
  validate_vertex_set(tree, xs);
  const auto counts = below_counts(tree, xs);
  SpannedSubtree out;
  out.vertices.assign(xs.begin(), xs.end());
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    if (counts[e] > 0 && counts[e] < xs.size()) {
      out.edges.push_back(e);
      out.vertices.push_back(tree.edge(e).u);
      out.vertices.push_back(tree.edge(e).v);
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()), out.vertices.end());
  return out;
}

EdgeSet odd_edges(const Tree& tree, std::span<const Vertex> xs) {
  validate_vertex_set(tree, xs);
  const auto counts = below_counts(tree, xs);
  EdgeSet out;
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    if (counts[e] % 2 == 1 && (xs.size() - counts[e]) % 2 == 1) out.push_back(e);
  }
  return out;
}

TourCheck check_tour(const Tree& tree, std::span<const Vertex> xs) {
  validate_vertex_set(tree, xs);
  TourCheck out;
  out.traversals.assign(tree.edge_count(), 0);
  if (xs.size() >= 2) {
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (EdgeId e : tree.path_edges(xs[a], xs[(a + 1) % xs.size()])) ++out.traversals[e];
    }
  }
  for (EdgeId e = 0; e < tree.edge_count(); ++e) {
    if (out.traversals[e] > 2) {
      out.nicely_ordered = false;
      out.overused = e;
      break;
    }
  }
  return out;
}

VertexSet nice_order(const Tree& tree, std::span<const Vertex> xs, std::optional<Vertex> root) {
  validate_vertex_set(tree, xs);
  const Vertex start = root.value_or(tree.first_label());
  tree.require_vertex(start);
  std::vector<std::size_t> visit(tree.vertex_count(), 0);
  std::vector<bool> seen(tree.vertex_count(), false);
  std::size_t clock = 0;
  std::vector<Vertex> stack{start};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    const auto vi = static_cast<std::size_t>(v - tree.first_label());
    if (seen[vi]) continue;
    seen[vi] = true;
    visit[vi] = clock++;
    const auto& nbrs = tree.neighbors(v);
    for (auto it = nbrs.rbegin(); it != nbrs.rend(); ++it) {
      if (!seen[static_cast<std::size_t>(it->first - tree.first_label())]) stack.push_back(it->first);
    }
  }
  VertexSet out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end(), [&](Vertex a, Vertex b) {
    return visit[static_cast<std::size_t>(a - tree.first_label())] <
           visit[static_cast<std::size_t>(b - tree.first_label())];
  });
  return out;
}

Tree random_tree(std::size_t n, std::uint64_t seed, WeightMode mode) {
  if (n == 0) throw std::invalid_argument("random_tree needs n >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::uint64_t bound) { return rng() % bound; };
  std::vector<Edge> edges;
  if (n == 2) {
    edges.push_back({1, 2});
  } else if (n > 2) {
    std::vector<std::size_t> code(n - 2);
    for (auto& c : code) c = static_cast<std::size_t>(draw(n));
    std::vector<std::size_t> degree(n, 1);
    for (auto c : code) ++degree[c];
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> leaves;
    for (std::size_t v = 0; v < n; ++v) {
      if (degree[v] == 1) leaves.push(v);
    }
    for (auto c : code) {
      const std::size_t leaf = leaves.top();
      leaves.pop();
      edges.push_back({static_cast<Vertex>(leaf + 1), static_cast<Vertex>(c + 1)});
      if (--degree[c] == 1) leaves.push(c);
    }
    const std::size_t a = leaves.top();
    leaves.pop();
    const std::size_t b = leaves.top();
    edges.push_back({static_cast<Vertex>(a + 1), static_cast<Vertex>(b + 1)});
  }
  if (mode == WeightMode::random_rational) {
    for (Edge& e : edges) {
      e.weight = Rational(static_cast<long>(draw(9) + 1), static_cast<unsigned long>(draw(4) + 1));
      e.weight.canonicalize();
    }
  }
  return Tree(n, std::move(edges), 1);
}

}  // namespace arbor
