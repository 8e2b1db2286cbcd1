#include "arbor/matroid.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "arbor/minors.hpp"
#include "arbor/parallel.hpp"
#include "arbor/pfaffian.hpp"

namespace arbor {

SetFunction::SetFunction(std::vector<Vertex> ground, std::optional<std::size_t> rank)
    : ground_(std::move(ground)), rank_(rank) {
  if (ground_.size() > 24) throw std::length_error("set functions are limited to 24 ground elements");
  if (rank_ && *rank_ > ground_.size()) throw std::invalid_argument("rank exceeds the ground set size");
  values_.assign(std::size_t{1} << ground_.size(), ExtRational::neg_inf());
}

bool SetFunction::in_domain(std::uint64_t mask) const {
  return !rank_ || static_cast<std::size_t>(__builtin_popcountll(mask)) == *rank_;
}

void SetFunction::set(std::uint64_t mask, ExtRational value) {
  if (!in_domain(mask)) throw std::invalid_argument("subset " + key(mask) + " is outside the domain");
  values_.at(mask) = std::move(value);
}

std::vector<Vertex> SetFunction::labels(std::uint64_t mask) const {
  std::vector<Vertex> out;
  for (std::size_t b = 0; b < ground_.size(); ++b) {
    if (mask >> b & 1) out.push_back(ground_[b]);
  }
  return out;
}

std::uint64_t SetFunction::mask_of(std::span<const Vertex> labels) const {
  std::uint64_t mask = 0;
  for (Vertex v : labels) {
    auto it = std::find(ground_.begin(), ground_.end(), v);
    if (it == ground_.end()) throw std::invalid_argument(std::to_string(v) + " is not in the ground set");
    mask |= std::uint64_t{1} << (it - ground_.begin());
  }
  return mask;
}

std::string SetFunction::key(std::uint64_t mask) const {
  std::string out;
  for (Vertex v : labels(mask)) {
    if (!out.empty()) out += ",";
    out += std::to_string(v);
  }
  return out;
}

SetFunction SetFunction::negated() const {
  SetFunction out(ground_, rank_);
  for (std::uint64_t m = 0; m < values_.size(); ++m) {
    if (values_[m].is_finite()) out.values_[m] = ExtRational(Rational(-values_[m].value()));
  }
  return out;
}

namespace {

// k-subsets of {0..m-1} as masks, in lexicographic order of sorted tuples.
std::vector<std::uint64_t> combinations(std::size_t m, std::size_t k) {
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> idx(k);
  for (std::size_t a = 0; a < k; ++a) idx[a] = a;
  if (k > m) return out;
  while (true) {
    std::uint64_t mask = 0;
    for (std::size_t a : idx) mask |= std::uint64_t{1} << a;
    out.push_back(mask);
    std::size_t a = k;
    while (a > 0 && idx[a - 1] == m - k + a - 1) --a;
    if (a == 0) break;
    ++idx[a - 1];
    for (std::size_t b = a; b < k; ++b) idx[b] = idx[b - 1] + 1;
  }
  return out;
}

std::vector<std::uint64_t> all_subsets_lex(std::size_t m) {
  std::vector<std::uint64_t> out;
  for (std::size_t k = 0; k <= m; ++k) {
    auto c = combinations(m, k);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

template <class Check>
ExchangeReport run_exchange(const SetFunction& w, const std::vector<std::uint64_t>& domain,
                            const ExchangeOptions& options, Check&& check) {
  ExchangeReport report;
  const std::uint64_t n = domain.size();
  const bool sample = n * n > options.exhaustive_cap;
  report.sampled = sample;
  const std::size_t outer = sample ? options.samples : static_cast<std::size_t>(n);
  const unsigned jobs = std::max(1u, options.jobs);
  std::vector<std::optional<ExchangeViolation>> first(jobs);
  std::vector<std::uint64_t> counts(jobs, 0);
  parallel_chunks(outer, jobs, [&](std::size_t begin, std::size_t end, unsigned worker) {
    std::mt19937_64 rng(options.seed + begin);
    for (std::size_t a = begin; a < end; ++a) {
      if (sample) {
        const std::uint64_t x = domain[rng() % n], y = domain[rng() % n];
        if (check(w, x, y, counts[worker], first[worker])) return;
      } else {
        for (std::uint64_t y : domain) {
          if (check(w, domain[a], y, counts[worker], first[worker])) return;
        }
      }
    }
  });
  for (unsigned k = 0; k < jobs; ++k) {
    report.checked += counts[k];
    if (!report.violation && first[k]) report.violation = first[k];
  }
  report.ok = !report.violation;
  return report;
}

}  // namespace

ExchangeReport check_valuated_matroid(const SetFunction& w, const ExchangeOptions& options) {
  if (!w.rank()) throw std::invalid_argument("valuated matroid check needs a rank");
  const auto domain = combinations(w.ground_size(), *w.rank());
  return run_exchange(w, domain, options,
                      [](const SetFunction& f, std::uint64_t x, std::uint64_t y, std::uint64_t& count,
                         std::optional<ExchangeViolation>& bad) {
                        const std::uint64_t only_x = x & ~y, only_y = y & ~x;
                        for (std::size_t i = 0; i < f.ground_size(); ++i) {
                          if (!(only_x >> i & 1)) continue;
                          ++count;
                          const ExtRational lhs = f[x] + f[y];
                          if (!lhs.is_finite()) continue;
                          ExtRational rhs;
                          const std::uint64_t bi = std::uint64_t{1} << i;
                          for (std::size_t j = 0; j < f.ground_size(); ++j) {
                            if (!(only_y >> j & 1)) continue;
                            const std::uint64_t bj = std::uint64_t{1} << j;
                            rhs = max(rhs, f[(x & ~bi) | bj] + f[(y & ~bj) | bi]);
                          }
                          if (lhs > rhs) {
                            bad = ExchangeViolation{f.labels(x), f.labels(y), f.ground()[i], lhs, rhs};
                            return true;
                          }
                        }
                        return false;
                      });
}

ExchangeReport check_delta_matroid(const SetFunction& w, const ExchangeOptions& options) {
  if (w.rank()) throw std::invalid_argument("Delta-matroid check needs a function on all subsets");
  const auto domain = all_subsets_lex(w.ground_size());
  return run_exchange(w, domain, options,
                      [](const SetFunction& f, std::uint64_t x, std::uint64_t y, std::uint64_t& count,
                         std::optional<ExchangeViolation>& bad) {
                        const std::uint64_t diff = x ^ y;
                        for (std::size_t i = 0; i < f.ground_size(); ++i) {
                          if (!(diff >> i & 1)) continue;
                          ++count;
                          const ExtRational lhs = f[x] + f[y];
                          if (!lhs.is_finite()) continue;
                          ExtRational rhs;
                          for (std::size_t j = 0; j < f.ground_size(); ++j) {
                            if (j == i || !(diff >> j & 1)) continue;
                            const std::uint64_t flip = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
                            rhs = max(rhs, f[x ^ flip] + f[y ^ flip]);
                          }
                          if (lhs > rhs) {
                            bad = ExchangeViolation{f.labels(x), f.labels(y), f.ground()[i], lhs, rhs};
                            return true;
                          }
                        }
                        return false;
                      });
}

MConcaveReport check_m_concave_rank2(const SymMatrixQ& f) {
  const std::size_t n = f.size();
  MConcaveReport report;
  // Vectors of the form e_a + e_b are the pairs a <= b.
  auto value = [&](const std::vector<int>& u) {
    std::size_t idx[2], c = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (int r = 0; r < u[a]; ++r) idx[c++] = a;
    }
    return f(idx[0], idx[1]);
  };
  for (std::size_t a = 0; a < n && !report.exchange_violation; ++a) {
    for (std::size_t b = a; b < n && !report.exchange_violation; ++b) {
      for (std::size_t c = 0; c < n && !report.exchange_violation; ++c) {
        for (std::size_t d = c; d < n && !report.exchange_violation; ++d) {
          std::vector<int> u(n, 0), v(n, 0);
          ++u[a], ++u[b], ++v[c], ++v[d];
          const ExtRational lhs = f(a, b) + f(c, d);
          if (!lhs.is_finite()) continue;
          for (std::size_t i = 0; i < n; ++i) {
            if (u[i] >= v[i]) continue;
            ExtRational rhs;
            for (std::size_t j = 0; j < n; ++j) {
              if (u[j] <= v[j]) continue;
              std::vector<int> u2 = u, v2 = v;
              ++u2[i], --u2[j], --v2[i], ++v2[j];
              rhs = max(rhs, value(u2) + value(v2));
            }
            if (lhs > rhs) {
              report.exchange_violation = std::array<std::size_t, 5>{a + 1, b + 1, c + 1, d + 1, i + 1};
              break;
            }
          }
        }
      }
    }
  }
  report.four_point_violation = check_4pc(f);
  if (report.exchange_violation.has_value() != report.four_point_violation.has_value()) {
    throw std::logic_error("[M-EXC] and the four-point condition disagree");
  }
  report.ok = !report.exchange_violation;
  return report;
}

SetFunction k_dissimilarity(const Tree& tree, std::size_t k) {
  const auto leaves = tree.leaves();
  if (k < 1 || k > leaves.size()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " outside 1.." + std::to_string(leaves.size()));
  }
  SetFunction w(leaves, k);
  for (std::uint64_t mask : combinations(leaves.size(), k)) {
    w.set(mask, ExtRational(tree.weight(spanned_subtree(tree, w.labels(mask)).edges)));
  }
  return w;
}

namespace {

std::vector<Vertex> rooted_ground(const Tree& tree, Vertex root) {
  tree.require_vertex(root);
  std::vector<Vertex> ground;
  for (Vertex v : tree.leaves()) {
    if (v != root) ground.push_back(v);
  }
  return ground;
}

}  // namespace

SetFunction rooted_k_dissimilarity(const Tree& tree, Vertex root, std::size_t k) {
  const auto ground = rooted_ground(tree, root);
  if (k < 1 || k > ground.size()) {
    throw std::invalid_argument("k = " + std::to_string(k) + " outside 1.." + std::to_string(ground.size()));
  }
  SetFunction w(ground, k);
  for (std::uint64_t mask : combinations(ground.size(), k)) {
    auto ys = w.labels(mask);
    ys.push_back(root);
    w.set(mask, ExtRational(tree.weight(spanned_subtree(tree, ys).edges)));
  }
  return w;
}

SetFunction odd_dissimilarity(const Tree& tree) {
  SetFunction w(tree.vertices(), std::nullopt);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << tree.vertex_count()); ++mask) {
    if (__builtin_popcountll(mask) % 2 == 1) continue;
    w.set(mask, ExtRational(tree.weight(odd_edges(tree, w.labels(mask)))));
  }
  return w;
}

OddRepresentationReport represent_odd(const Tree& tree, std::size_t max_vertices) {
  if (tree.vertex_count() > max_vertices) {
    throw std::length_error("represent_odd is capped at " + std::to_string(max_vertices) + " vertices");
  }
  OddRepresentationReport report;
  const auto vs = tree.vertices();
  report.order = nice_order(tree, vs);
  const PolyMatrix b = build_B(tree, report.order);
  const auto pf = principal_pfaffians(b);
  const auto pf_dual = principal_pfaffians(b.substitute_power(Rational(-1)));
  for (std::uint64_t mask = 0; mask < pf.size(); ++mask) {
    if (__builtin_popcountll(mask) % 2 == 1) continue;
    std::vector<Vertex> xs;
    for (std::size_t a = 0; a < report.order.size(); ++a) {
      if (mask >> a & 1) xs.push_back(report.order[a]);
    }
    ++report.checked;
    const Rational expected = tree.weight(odd_edges(tree, xs));
    const ExtRational v = valuation(pf[mask]), v_dual = valuation(pf_dual[mask]);
    if (v != ExtRational(expected) || v_dual != ExtRational(Rational(-expected))) {
      report.ok = false;
      report.mismatch = xs;
      report.detail = "val(Pf B[X]) = " + v.to_string() + ", val(Pf B^v[X]) = " + v_dual.to_string() +
                      ", D^o(X) = " + expected.get_str();
      break;
    }
  }
  return report;
}

PolyMatrix rooted_schur_matrix(const Tree& tree, Vertex root, std::span<const Vertex> ground) {
  return PolyMatrix::generate(ground.size(), Symmetry::symmetric, [&](std::size_t a, std::size_t b) {
    return ExactPoly::power(tree.dist(ground[a], ground[b])) -
           ExactPoly::power(tree.dist(root, ground[a]) + tree.dist(root, ground[b]));
  });
}

RootedReport rooted_exact_check(const Tree& tree, Vertex root, std::size_t k, std::size_t max_subsets,
                                std::uint64_t seed) {
  const SetFunction d0 = rooted_k_dissimilarity(tree, root, k);
  RootedReport report;
  report.ground = d0.ground();
  const PolyMatrix m = rooted_schur_matrix(tree, root, report.ground);
  const std::size_t n = report.ground.size();

  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<std::size_t> lead(size);
    for (std::size_t a = 0; a < size; ++a) lead[a] = a;
    const ExactPoly minor = det(m.principal(lead));
    const int expected = size % 2 == 0 ? 1 : -1;
    if (minor.is_zero() || sgn(minor.leading_term().coefficient) != expected) report.negative_definite = false;
  }

  std::vector<std::uint64_t> masks = combinations(n, k);
  if (masks.size() > max_subsets) {
    report.sampled = true;
    std::mt19937_64 rng(seed);
    std::shuffle(masks.begin(), masks.end(), rng);
    masks.resize(max_subsets);
    std::sort(masks.begin(), masks.end());
  }
  for (std::uint64_t mask : masks) {
    RootedRow row;
    row.y = d0.labels(mask);
    row.d0 = d0[mask].value();
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < n; ++a) {
      if (mask >> a & 1) idx.push_back(a);
    }
    row.det_m = det(m.principal(idx));
    std::vector<Vertex> with_root = row.y;
    with_root.push_back(root);
    row.schur_ok = row.det_m == minor_oracle(tree, with_root);
    row.val_exact = valuation(row.det_m.substitute_power(Rational(1, 2)));
    const bool doubled = valuation(row.det_m) == ExtRational(Rational(2 * row.d0));
    if (!row.schur_ok || !doubled || row.val_exact != ExtRational(row.d0)) {
      if (report.exact_ok) report.failure = "exact path disagrees at Y = " + d0.key(mask);
      report.exact_ok = false;
    }
    report.rows.push_back(std::move(row));
  }
  if (!report.negative_definite && report.failure.empty()) report.failure = "M is not negative definite";
  report.ok = report.exact_ok && report.negative_definite;
  return report;
}

RootedReport represent_rooted(const Tree& tree, Vertex root, std::size_t k, const RootedOptions& options) {
  RootedReport report = rooted_exact_check(tree, root, k, options.max_subsets, options.seed);
  const std::size_t n = report.ground.size();
  const PolyMatrix m = rooted_schur_matrix(tree, root, report.ground);

  if (options.window) {
    report.window = *options.window;
  } else {
    std::optional<Rational> hi, lo;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (const Term& term : m(i, j).terms()) {
          if (!hi || *hi < term.exponent) hi = term.exponent;
          if (!lo || term.exponent < *lo) lo = term.exponent;
        }
      }
    }
    report.window = hi ? Rational(4 * (*hi - *lo)) : Rational(4);
    if (report.window <= 0) report.window = 4;
  }

  SeriesMatrix neg = to_series(m);
  for (auto& row : neg) {
    for (auto& x : row) x = -x;
  }
  const SeriesMatrix q = gram_factor(neg, report.window);

  const Integer bound = Integer(1) << 31;
  for (unsigned attempt = 0; attempt <= options.max_reseeds; ++attempt) {
    report.attempts = attempt + 1;
    report.seed_used = options.seed + 0x9E3779B97F4A7C15ull * attempt;
    std::mt19937_64 rng(report.seed_used);
    auto draw = [&]() {
      Integer num = Integer(static_cast<unsigned long>(rng() % (2 * bound.get_ui() + 1))) - bound;
      Integer den = Integer(static_cast<unsigned long>(rng() % bound.get_ui() + 1));
      Rational r(num, den);
      r.canonicalize();
      return Series(r);
    };
    SeriesMatrix j(k, std::vector<Series>(q.size()));
    for (auto& row : j) {
      for (auto& x : row) x = draw();
    }
    report.r = multiply(j, q);

    bool degenerate = false;
    bool too_high = false;
    for (RootedRow& row : report.rows) {
      const std::uint64_t mask = [&] {
        std::uint64_t mk = 0;
        for (Vertex v : row.y) {
          mk |= std::uint64_t{1} << (std::find(report.ground.begin(), report.ground.end(), v) - report.ground.begin());
        }
        return mk;
      }();
      SeriesMatrix sub(k, std::vector<Series>());
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t a = 0; a < n; ++a) {
          if (mask >> a & 1) sub[r].push_back(report.r[r][a]);
        }
      }
      row.val_series = valuation(det_small(sub));
      if (*row.val_series < ExtRational(row.d0)) degenerate = true;
      if (*row.val_series > ExtRational(row.d0)) too_high = true;
    }
    if (too_high) {
      report.series_ok = false;
      report.failure = "series valuation exceeds D_0^k";
      break;
    }
    if (!degenerate) {
      report.series_ok = true;
      break;
    }
    report.series_ok = false;
    report.failure = "J degenerate after " + std::to_string(attempt + 1) + " attempt(s)";
  }
  if (report.series_ok && report.exact_ok && report.negative_definite) report.failure.clear();
  report.ok = report.exact_ok && report.negative_definite && report.series_ok;
  return report;
}

SetFunction val_det_map(const Tree& tree) {
  if (tree.vertex_count() > 12) throw std::length_error("val_det_map is capped at 12 vertices");
  SetFunction w(tree.vertices(), std::nullopt);
  w.set(0, ExtRational(Rational(0)));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << tree.vertex_count()); ++mask) {
    w.set(mask, valuation(minor_oracle(tree, w.labels(mask))));
  }
  return w;
}

}  // namespace arbor
