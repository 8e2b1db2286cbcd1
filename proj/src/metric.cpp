#include "arbor/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <random>
#include <sstream>

#include "arbor/parallel.hpp"

namespace arbor {

SymMatrixQ::SymMatrixQ(std::size_t n, std::vector<ExtRational> entries) : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n * n) throw std::invalid_argument("matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) {
        throw std::invalid_argument("matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
      }
    }
  }
}

SymMatrixQ SymMatrixQ::parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::vector<ExtRational>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    for (char& c : raw) {
      if (c == ',' || c == ';') c = ' ';
    }
    std::istringstream cells(raw);
    std::string cell;
    std::vector<ExtRational> row;
    while (cells >> cell) {
      try {
        row.push_back(ExtRational::parse(cell));
      } catch (const ParseError& err) {
        throw ParseError("line " + std::to_string(line_no) + ": " + err.what());
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                       " entries, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n > 0 && rows.front().size() != n) {
    throw ParseError("line " + std::to_string(line_no) + ": matrix has " + std::to_string(n) + " rows and " +
                     std::to_string(rows.front().size()) + " columns");
  }
  std::vector<ExtRational> flat;
  for (auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  try {
    return SymMatrixQ(n, std::move(flat));
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

SymMatrixQ SymMatrixQ::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string SymMatrixQ::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j > 0) out += ",";
      out += (*this)(i, j).to_string();
    }
    out += "\n";
  }
  return out;
}

void SymMatrixQ::set(std::size_t i, std::size_t j, const ExtRational& value) {
  entries_.at(i * n_ + j) = value;
  entries_.at(j * n_ + i) = value;
}

bool SymMatrixQ::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const ExtRational& x) { return x.is_finite(); });
}

SymMatrixQ distance_matrix(const Tree& tree, std::span<const Vertex> phi) {
  SymMatrixQ d(phi.size());
  for (std::size_t a = 0; a < phi.size(); ++a) {
    for (std::size_t b = a; b < phi.size(); ++b) d.set(a, b, ExtRational(tree.dist(phi[a], phi[b])));
  }
  return d;
}

SymMatrixQ distance_matrix(const Tree& tree) {
  const auto vs = tree.vertices();
  return distance_matrix(tree, vs);
}

std::optional<Quadruple> check_4pc(const SymMatrixQ& w, unsigned jobs) {
  const std::size_t n = w.size();
  std::vector<std::optional<Quadruple>> first(std::max(1u, jobs));
  parallel_chunks(n, jobs, [&](std::size_t begin, std::size_t end, unsigned worker) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t l = 0; l < n; ++l) {
            const ExtRational lhs = w(i, j) + w(k, l);
            if (lhs <= max(w(i, k) + w(j, l), w(i, l) + w(j, k))) continue;
            first[worker] = Quadruple{i + 1, j + 1, k + 1, l + 1};
            return;
          }
        }
      }
    }
  });
  for (const auto& q : first) {
    if (q) return q;
  }
  return std::nullopt;
}

FourPointViolation::FourPointViolation(const Quadruple& q)
    : std::invalid_argument("four-point condition fails at (" + std::to_string(q[0]) + "," + std::to_string(q[1]) +
                            "," + std::to_string(q[2]) + "," + std::to_string(q[3]) + ")"),
      q_(q) {}

TreeMetricDecomposition decompose(const SymMatrixQ& w) {
  if (!w.all_finite()) throw std::invalid_argument("decompose needs finite entries");
  const std::size_t n = w.size();
  std::vector<Rational> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = w(i, i).value() / 2;
  SymMatrixQ d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational v = w(i, j).value() - p[i] - p[j];
      if (v < 0) {
        throw std::invalid_argument("not a tree metric plus potential: D_" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + " = " + v.get_str() + " < 0");
      }
      d.set(i, j, ExtRational(v));
    }
  }
  if (auto q = check_4pc(d)) throw FourPointViolation(*q);
  Realization r = realize_tree(d);
  return {std::move(d), std::move(p), std::move(r)};
}

SymMatrixQ recompose(const SymMatrixQ& d, std::span<const Rational> p) {
  if (p.size() != d.size()) throw std::invalid_argument("potential length does not match the matrix");
  SymMatrixQ w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i; j < d.size(); ++j) w.set(i, j, d(i, j) + ExtRational(Rational(p[i] + p[j])));
  }
  return w;
}

namespace {

// Growing weighted tree on nodes 0..size-1.
struct Builder {
  std::vector<std::map<std::size_t, Rational>> adj;

  std::size_t add_node() {
    adj.emplace_back();
    return adj.size() - 1;
  }
  void link(std::size_t a, std::size_t b, const Rational& w) {
    adj[a][b] = w;
    adj[b][a] = w;
  }
  void unlink(std::size_t a, std::size_t b) {
    adj[a].erase(b);
    adj[b].erase(a);
  }
  std::vector<std::size_t> path(std::size_t from, std::size_t to) const {
    std::vector<std::size_t> parent(adj.size(), adj.size());
    std::queue<std::size_t> q;
    q.push(from);
    parent[from] = from;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (const auto& [w, len] : adj[v]) {
        if (parent[w] == adj.size()) {
          parent[w] = v;
          q.push(w);
        }
      }
    }
    std::vector<std::size_t> out{to};
    while (out.back() != from) out.push_back(parent[out.back()]);
    std::reverse(out.begin(), out.end());
    return out;
  }
  // Node at distance s from `from` along the path to `to`, subdividing an
  // edge when s falls inside it.
  std::size_t point_on_path(std::size_t from, std::size_t to, const Rational& s) {
    const auto nodes = path(from, to);
    Rational walked;
    for (std::size_t a = 0; a + 1 < nodes.size(); ++a) {
      if (walked == s) return nodes[a];
      const Rational len = adj[nodes[a]].at(nodes[a + 1]);
      if (s < walked + len) {
        const std::size_t mid = add_node();
        unlink(nodes[a], nodes[a + 1]);
        link(nodes[a], mid, s - walked);
        link(mid, nodes[a + 1], walked + len - s);
        return mid;
      }
      walked += len;
    }
    return nodes.back();
  }
};

}  // namespace

Realization realize_tree(const SymMatrixQ& d) {
  const std::size_t n = d.size();
  if (n == 0) throw std::invalid_argument("realize_tree needs at least one point");
  if (!d.all_finite()) throw std::invalid_argument("realize_tree needs finite entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i).value() != 0) throw std::invalid_argument("dissimilarity matrix needs a zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j).value() < 0) throw std::invalid_argument("dissimilarity matrix has a negative entry");
    }
  }
  if (auto q = check_4pc(d)) throw FourPointViolation(*q);
  auto D = [&](std::size_t i, std::size_t j) -> const Rational& { return d(i, j).value(); };

  Builder b;
  std::vector<std::size_t> node(n);
  node[0] = b.add_node();
  for (std::size_t x = 1; x < n; ++x) {
    std::optional<std::size_t> twin;
    for (std::size_t a = 0; a < x && !twin; ++a) {
      if (D(a, x) == 0) twin = a;
    }
    if (twin) {
      node[x] = node[*twin];
      continue;
    }
    std::size_t best_a = 0, best_b = 0;
    Rational best_h = D(0, x);
    for (std::size_t a = 0; a < x; ++a) {
      for (std::size_t c = a; c < x; ++c) {
        Rational h = (D(a, x) + D(c, x) - D(a, c)) / 2;
        if (h < best_h) {
          best_h = h;
          best_a = a;
          best_b = c;
        }
      }
    }
    const Rational s = (D(best_a, x) + D(best_a, best_b) - D(best_b, x)) / 2;
    const std::size_t at = b.point_on_path(node[best_a], node[best_b], s);
    if (best_h > 0) {
      node[x] = b.add_node();
      b.link(at, node[x], best_h);
    } else {
      node[x] = at;
    }
  }

  std::vector<Edge> edges;
  for (std::size_t v = 0; v < b.adj.size(); ++v) {
    for (const auto& [w, len] : b.adj[v]) {
      if (v < w) edges.push_back({static_cast<Vertex>(v + 1), static_cast<Vertex>(w + 1), len});
    }
  }
  Realization out{Tree(b.adj.size(), std::move(edges), 1), {}};
  for (std::size_t x = 0; x < n; ++x) out.phi.push_back(static_cast<Vertex>(node[x] + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (out.tree.dist(out.phi[i], out.phi[j]) != D(i, j)) {
        throw std::logic_error("realized tree does not reproduce D at (" + std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ")");
      }
    }
  }
  return out;
}

namespace {

Rational int_power(const Rational& base, long e) {
  Rational r;
  const unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), k);
  mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), k);
  r.canonicalize();
  return e < 0 ? Rational(1 / r) : r;
}

}  // namespace

RationalMatrix tau_matrix(const SymMatrixQ& w, const Rational& tau) {
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  const std::size_t n = w.size();
  std::int64_t l = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j).is_finite()) l = lcm64(l, to_int64(w(i, j).value().get_den()));
    }
  }
  RationalMatrix m{n, std::vector<Rational>(n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!w(i, j).is_finite()) continue;
      const Rational e = w(i, j).value() * Rational(static_cast<long>(l));
      m(i, j) = int_power(tau, to_int64(e.get_num()));
    }
  }
  return m;
}

Rational det_exact(const RationalMatrix& m, std::span<const std::size_t> rows) {
  const std::size_t k = rows.size();
  std::vector<Rational> a(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i * k + j] = m(rows[i], rows[j]);
  }
  Rational result(1);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pivot = c;
    while (pivot < k && a[pivot * k + c] == 0) ++pivot;
    if (pivot == k) return Rational(0);
    if (pivot != c) {
      for (std::size_t j = 0; j < k; ++j) std::swap(a[pivot * k + j], a[c * k + j]);
      result = -result;
    }
    const Rational p = a[c * k + c];
    result *= p;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (a[r * k + c] == 0) continue;
      const Rational f = a[r * k + c] / p;
      for (std::size_t j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return result;
}

StarConditionResult star_condition_check(const RationalMatrix& m, std::size_t exhaustive_cap, std::size_t samples,
                                         std::uint64_t seed) {
  StarConditionResult out;
  const std::size_t n = m.n;
  auto test = [&](std::uint64_t mask) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) rows.push_back(i);
    }
    ++out.checked;
    const Rational d = det_exact(m, rows);
    const bool bad = rows.size() % 2 == 1 ? d < 0 : d > 0;
    if (bad) {
      out.ok = false;
      for (std::size_t r : rows) out.violation.push_back(r + 1);
      out.det = d;
    }
    return bad;
  };
  if (n <= exhaustive_cap) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      if (test(mask)) break;
    }
  } else {
    out.sampled = true;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
      std::uint64_t mask = 0;
      while (mask == 0) {
        for (std::size_t i = 0; i < n; ++i) mask |= static_cast<std::uint64_t>(rng() & 1) << i;
      }
      if (test(mask)) break;
    }
  }
  return out;
}

namespace {

template <class T, class IsZero, class Sign>
Inertia congruence_inertia(std::size_t n, std::vector<T> a, IsZero is_zero, Sign sign) {
  auto at = [&](std::size_t i, std::size_t j) -> T& { return a[i * n + j]; };
  auto swap_index = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(at(i, c), at(j, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(at(r, i), at(r, j));
  };
  Inertia out;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && is_zero(at(pivot, pivot))) ++pivot;
    if (pivot == n) {
      // All remaining diagonal entries vanish: fold a nonzero off-diagonal
      // entry onto the diagonal, or stop if the block is zero.
      std::optional<std::pair<std::size_t, std::size_t>> off;
      for (std::size_t i = k; i < n && !off; ++i) {
        for (std::size_t j = i + 1; j < n && !off; ++j) {
          if (!is_zero(at(i, j))) off = std::make_pair(i, j);
        }
      }
      if (!off) {
        out.zeros += n - k;
        break;
      }
      auto [i, j] = *off;
      for (std::size_t c = 0; c < n; ++c) at(i, c) += at(j, c);
      for (std::size_t r = 0; r < n; ++r) at(r, i) += at(r, j);
      pivot = i;
    }
    swap_index(k, pivot);
    const T p = at(k, k);
    (sign(p) > 0 ? out.positives : out.negatives) += 1;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (is_zero(at(r, k))) continue;
      const T f = at(r, k) / p;
      for (std::size_t c = k; c < n; ++c) at(r, c) -= f * at(k, c);
    }
    for (std::size_t c = k + 1; c < n; ++c) at(k, c) = T(0);
    for (std::size_t r = k + 1; r < n; ++r) at(r, k) = T(0);
  }
  return out;
}

}  // namespace

Inertia inertia_numeric(const RationalMatrix& m) {
  return congruence_inertia<Rational>(
      m.n, m.entries, [](const Rational& x) { return x == 0; }, [](const Rational& x) { return sgn(x); });
}

Inertia inertia_numeric(std::size_t n, std::vector<double> entries, double tol) {
  if (entries.size() != n * n) throw std::invalid_argument("matrix is not square");
  double scale = 0;
  for (double x : entries) scale = std::max(scale, std::abs(x));
  const double cut = tol * std::max(scale, 1.0);
  return congruence_inertia<double>(
      n, std::move(entries), [cut](double x) { return std::abs(x) <= cut; },
      [](double x) { return x > 0 ? 1 : -1; });
}

HppCheck hpp_eigen_check(const SymMatrixQ& f, std::span<const Rational> taus) {
  HppCheck out;
  out.certificate = check_4pc(f);
  out.four_point = !out.certificate;
  for (const Rational& tau : taus) {
    const Inertia in = inertia_numeric(tau_matrix(f, tau));
    out.per_tau.emplace_back(tau, in);
    if (in.positives > 1 && !out.counterexample_tau) out.counterexample_tau = tau;
  }
  out.ok = out.four_point && !out.counterexample_tau;
  return out;
}

}  // namespace arbor
