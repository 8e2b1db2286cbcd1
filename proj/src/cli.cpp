#include "arbor/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <random>
#include <sstream>

#include "arbor/cyclekernel.hpp"
#include "arbor/matroid.hpp"
#include "arbor/metric.hpp"
#include "arbor/minors.hpp"
#include "arbor/parallel.hpp"
#include "arbor/pfaffian.hpp"
#include "arbor/tree.hpp"
#include "arbor/tropic.hpp"

namespace arbor::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Outcome {
  json report;
  int code = 0;
  std::optional<std::string> raw_text;  // replaces the flattened text format
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<Vertex> parse_vertices(const std::string& text) {
  std::vector<Vertex> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Vertex>(v));
    } catch (const std::exception&) {
      throw ParseError("bad vertex '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

std::vector<Rational> parse_rationals(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_rational(item));
  }
  return out;
}

std::string join(std::span<const Vertex> xs) {
  std::string out;
  for (Vertex v : xs) {
    if (!out.empty()) out += ",";
    out += std::to_string(v);
  }
  return out;
}

json edge_list(const Tree& tree, const EdgeSet& edges) {
  json out = json::array();
  for (EdgeId e : edges) out.push_back({tree.edge(e).u, tree.edge(e).v});
  return out;
}

json term_json(const Term& t) { return {{"exp", t.exponent.get_str()}, {"coeff", t.coefficient.get_str()}}; }

json matrix_json(const SymMatrixQ& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j).to_string());
    out.push_back(row);
  }
  return out;
}

struct TreeSource {
  std::string path;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string weights = "unit";

  void attach(CLI::App* app) {
    app->add_option("--tree", path, "tree file");
    app->add_option("--n", n, "generate a random tree on n vertices");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--weights", weights, "unit | rational")->check(CLI::IsMember({"unit", "rational", "mixed"}));
  }

  WeightMode mode(std::size_t index) const {
    if (weights == "rational") return WeightMode::random_rational;
    if (weights == "mixed") return index % 2 == 1 ? WeightMode::random_rational : WeightMode::unit;
    return WeightMode::unit;
  }

  Tree load() const {
    if (path.empty() == (n == 0)) throw UsageError("give exactly one of --tree FILE or --n N");
    if (!path.empty()) return Tree::read_file(path);
    return random_tree(n, seed, mode(0));
  }
};

// One random tree per index; each gets its own derived seed.
struct Sweep {
  std::size_t n = 6;
  std::size_t trees = 10;
  std::uint64_t seed = 1;
  std::string weights = "mixed";

  void attach(CLI::App* app) {
    app->add_option("--n", n, "vertices per tree")->check(CLI::Range(1, 16));
    app->add_option("--trees", trees, "number of random trees");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--weights", weights, "unit | rational | mixed")
        ->check(CLI::IsMember({"unit", "rational", "mixed"}));
  }

  Tree tree(std::size_t index) const {
    WeightMode mode = WeightMode::unit;
    if (weights == "rational" || (weights == "mixed" && index % 2 == 1)) mode = WeightMode::random_rational;
    return random_tree(n, derive_seed(seed, index), mode);
  }
};

std::vector<std::vector<Vertex>> nonempty_subsets(const Tree& tree, std::size_t max_size = 64) {
  std::vector<std::vector<Vertex>> out;
  const auto vs = tree.vertices();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << vs.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > max_size) continue;
    std::vector<Vertex> xs;
    for (std::size_t b = 0; b < vs.size(); ++b) {
      if (mask >> b & 1) xs.push_back(vs[b]);
    }
    out.push_back(std::move(xs));
  }
  return out;
}

json exchange_json(const ExchangeReport& r) {
  json out{{"ok", r.ok}, {"sampled", r.sampled}, {"checked", r.checked}, {"violation", nullptr}};
  if (r.violation) {
    out["violation"] = {{"X", join(r.violation->x)},
                        {"Y", join(r.violation->y)},
                        {"i", r.violation->i},
                        {"lhs", r.violation->lhs.to_string()},
                        {"rhs", r.violation->rhs.to_string()}};
  }
  return out;
}

json set_function_json(const SetFunction& w) {
  json values = json::object();
  json rows = json::array();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w.ground_size()); ++mask) {
    if (!w.in_domain(mask)) continue;
    values[w.key(mask)] = w[mask].to_string();
    rows.push_back({{"subset", w.key(mask)}, {"value", w[mask].to_string()}});
  }
  json out{{"ground", w.ground()}, {"values", values}, {"rows", rows}};
  out["rank"] = w.rank() ? json(*w.rank()) : json(nullptr);
  return out;
}

SetFunction read_set_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open function file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad JSON in '") + path + "': " + e.what());
  }
  std::vector<Vertex> ground = j.at("ground").get<std::vector<Vertex>>();
  std::optional<std::size_t> rank;
  if (j.contains("rank") && !j["rank"].is_null()) rank = j["rank"].get<std::size_t>();
  SetFunction w(ground, rank);
  for (const auto& [key, value] : j.at("values").items()) {
    const auto labels = parse_vertices(key);
    w.set(w.mask_of(labels), ExtRational::parse(value.is_string() ? value.get<std::string>() : value.dump()));
  }
  return w;
}

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return s;
}

void flatten(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t a = 0; a < j.size(); ++a) flatten(j[a], prefix + "[" + std::to_string(a) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(const Outcome& outcome, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << outcome.report.dump(2) << "\n";
  } else if (format == "text") {
    if (outcome.raw_text) {
      out << *outcome.raw_text;
    } else {
      flatten(outcome.report, "", out);
    }
  } else {
    const json* rows = outcome.report.contains("rows") ? &outcome.report["rows"] : nullptr;
    if (!rows || !rows->is_array()) throw UsageError("--format csv needs a row-oriented report");
    if (rows->empty()) return;
    std::vector<std::string> header;
    for (const auto& [k, v] : rows->front().items()) header.push_back(k);
    for (std::size_t a = 0; a < header.size(); ++a) out << (a ? "," : "") << header[a];
    out << "\n";
    for (const auto& row : *rows) {
      for (std::size_t a = 0; a < header.size(); ++a) {
        out << (a ? "," : "") << (row.contains(header[a]) ? csv_cell(row[header[a]]) : "");
      }
      out << "\n";
    }
  }
}

// ---- subcommands ---------------------------------------------------------

Outcome cmd_tree_gen(const TreeSource& src) {
  if (src.n == 0) throw UsageError("tree-gen needs --n");
  const Tree t = random_tree(src.n, src.seed, src.mode(0));
  json edges = json::array();
  for (const Edge& e : t.edges()) edges.push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight.get_str()}});
  return {{{"n", t.vertex_count()}, {"seed", src.seed}, {"edges", edges}, {"tree", t.to_text()}}, 0, t.to_text()};
}

Outcome cmd_minor(const TreeSource& src, const std::string& xs_text, unsigned jobs) {
  const Tree t = src.load();
  const auto xs = xs_text.empty() ? t.vertices() : parse_vertices(xs_text);
  const ExactPoly formula = minor_formula(t, xs, {ForestUniverse::spanned_subtree, jobs});
  const ExactPoly oracle = minor_oracle(t, xs);
  const bool equal = formula == oracle;
  return {{{"tree", t.to_text()},
           {"X", join(xs)},
           {"formula", formula.to_string()},
           {"oracle", oracle.to_string()},
           {"equal", equal},
           {"leading", term_json(minor_leading(t, xs))}},
          equal ? 0 : 1};
}

Outcome cmd_minor_verify(const Sweep& sweep, unsigned jobs) {
  struct Result {
    json rows = json::array();
    json failures = json::array();
  };
  const auto results = parallel_map<Result>(sweep.trees, jobs, [&](std::size_t i) {
    Result r;
    const Tree t = sweep.tree(i);
    for (const auto& xs : nonempty_subsets(t)) {
      const ExactPoly formula = minor_formula(t, xs), oracle = minor_oracle(t, xs);
      const bool equal = formula == oracle;
      const bool leading_ok = minor_leading(t, xs) == oracle.leading_term();
      r.rows.push_back({{"tree", i}, {"X", join(xs)}, {"equal", equal}, {"leading_ok", leading_ok}});
      if (!equal || !leading_ok) {
        r.failures.push_back({{"tree", t.to_text()}, {"X", join(xs)}, {"formula", formula.to_string()},
                              {"oracle", oracle.to_string()}, {"leading", term_json(minor_leading(t, xs))}});
      }
    }
    return r;
  });
  json rows = json::array(), failures = json::array();
  for (const auto& r : results) {
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    failures.insert(failures.end(), r.failures.begin(), r.failures.end());
  }
  const bool ok = failures.empty();
  return {{{"ok", ok}, {"checked", rows.size()}, {"trees", sweep.trees}, {"n", sweep.n}, {"seed", sweep.seed},
           {"rows", rows}, {"failures", failures}},
          ok ? 0 : 1};
}

Outcome cmd_pfaffian(const TreeSource& src, const std::string& xs_text, bool reorder) {
  const Tree t = src.load();
  auto xs = xs_text.empty() ? t.vertices() : parse_vertices(xs_text);
  validate_vertex_set(t, xs);
  if (xs.size() % 2 != 0) throw UsageError("Pfaffian undefined for odd size");
  if (reorder) xs = nice_order(t, xs);
  const TourCheck tour = check_tour(t, xs);
  const ExactPoly oracle = pf_oracle(t, xs);
  json report{{"tree", t.to_text()},
              {"X_order", join(xs)},
              {"nicely_ordered", tour.nicely_ordered},
              {"O_X", edge_list(t, odd_edges(t, xs))},
              {"oracle", oracle.to_string()},
              {"formula", nullptr},
              {"equal", nullptr},
              {"pairing", nullptr}};
  int code = 0;
  if (tour.nicely_ordered) {
    const ExactPoly formula = pf_formula(t, xs);
    report["formula"] = formula.to_string();
    report["equal"] = formula == oracle;
    json pairs = json::array();
    for (const OddPair& p : odd_pairing(t, xs)) pairs.push_back({p.i, p.j});
    report["pairing"] = pairs;
    if (formula != oracle) code = 1;
  } else {
    report["overused_edge"] = {t.edge(*tour.overused).u, t.edge(*tour.overused).v};
  }
  return {report, code};
}

bool pairing_valid(const Tree& t, std::span<const Vertex> xs, const std::vector<OddPair>& pairs) {
  std::vector<unsigned> used(t.edge_count(), 0);
  std::vector<bool> seen(xs.size(), false);
  for (const OddPair& p : pairs) {
    if ((p.pos_i + p.pos_j) % 2 != 1 || seen[p.pos_i] || seen[p.pos_j]) return false;
    seen[p.pos_i] = seen[p.pos_j] = true;
    for (EdgeId e : t.path_edges(p.i, p.j)) ++used[e];
  }
  const EdgeSet odd = odd_edges(t, xs);
  for (EdgeId e = 0; e < t.edge_count(); ++e) {
    const bool in_odd = std::binary_search(odd.begin(), odd.end(), e);
    if (used[e] != (in_odd ? 1u : 0u)) return false;
  }
  return pairs.size() * 2 == xs.size();
}

Outcome cmd_pf_verify(const Sweep& sweep, std::size_t negatives, unsigned jobs) {
  struct Result {
    json rows = json::array();
    json failures = json::array();
  };
  const auto results = parallel_map<Result>(sweep.trees, jobs, [&](std::size_t i) {
    Result r;
    const Tree t = sweep.tree(i);
    for (const auto& subset : nonempty_subsets(t)) {
      if (subset.size() % 2 != 0) continue;
      const auto xs = nice_order(t, subset);
      const ExactPoly formula = pf_formula(t, xs), oracle = pf_oracle(t, xs);
      const bool pairing_ok = pairing_valid(t, xs, odd_pairing(t, xs));
      r.rows.push_back({{"tree", i}, {"X_order", join(xs)}, {"equal", formula == oracle}, {"pairing_ok", pairing_ok}});
      if (formula != oracle || !pairing_ok) {
        r.failures.push_back({{"tree", t.to_text()}, {"X_order", join(xs)}, {"formula", formula.to_string()},
                              {"oracle", oracle.to_string()}, {"pairing_ok", pairing_ok}});
      }
    }
    return r;
  });
  json rows = json::array(), failures = json::array();
  for (const auto& r : results) {
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    failures.insert(failures.end(), r.failures.begin(), r.failures.end());
  }
  // Orderings that are not nicely ordered and break the closed form.
  json found = json::array();
  for (std::size_t i = 0; i < sweep.trees && found.size() < negatives; ++i) {
    const Tree t = sweep.tree(i);
    for (const auto& subset : nonempty_subsets(t)) {
      if (subset.size() < 4 || subset.size() % 2 != 0 || found.size() >= negatives) continue;
      std::vector<Vertex> xs = subset;
      const ExactPoly closed = ExactPoly::power(t.weight(odd_edges(t, xs)));
      do {
        if (is_nicely_ordered(t, xs)) continue;
        const ExactPoly oracle = pf_oracle(t, xs);
        if (oracle != closed) {
          found.push_back({{"tree", t.to_text()}, {"X_order", join(xs)}, {"oracle", oracle.to_string()},
                           {"t^|O_X|", closed.to_string()}});
          break;
        }
      } while (std::next_permutation(xs.begin(), xs.end()));
    }
  }
  const bool ok = failures.empty();
  return {{{"ok", ok}, {"checked", rows.size()}, {"rows", rows}, {"failures", failures},
           {"negatives_requested", negatives}, {"negatives_found", found.size()}, {"negatives", found}},
          ok ? 0 : 1};
}

Outcome cmd_cycles_verify(const Sweep& sweep, std::size_t max_x, std::size_t bracket_max_x, std::size_t cap,
                          unsigned jobs) {
  struct Result {
    json rows = json::array();
    json failures = json::array();
  };
  const auto results = parallel_map<Result>(sweep.trees, jobs, [&](std::size_t i) {
    Result r;
    const Tree t = sweep.tree(i);
    for (const auto& xs : nonempty_subsets(t, max_x)) {
      const ExactPoly formula = minor_formula(t, xs);
      const bool chain = det_via_cycles(t, xs, cap) == formula && det_via_tight_cycles(t, xs, cap) == formula;
      const CancellationReport c = check_cancellation(t, xs, cap);
      std::size_t brackets = 0;
      bool brackets_equal = true;
      if (xs.size() <= bracket_max_x) {
        enumerate_spanned_forests(t, xs, [&](const SpannedForest& f) {
          const Forest forest = Forest::from_spanned(t, f.vertices, f.edges);
          ++brackets;
          if (bracket_enum(forest, xs, cap) != bracket_closed(forest, xs)) brackets_equal = false;
        });
      }
      r.rows.push_back({{"tree", i}, {"X", join(xs)}, {"chain_equal", chain}, {"balanced", c.balanced},
                        {"flips_regular", c.flips_regular}, {"heavy_supports", c.heavy_supports},
                        {"brackets_checked", brackets}, {"brackets_equal", brackets_equal}});
      if (!chain || !c.balanced || !c.flips_regular || !brackets_equal) {
        r.failures.push_back({{"tree", t.to_text()}, {"X", join(xs)}, {"detail", c.failure}});
      }
    }
    return r;
  });
  json rows = json::array(), failures = json::array();
  for (const auto& r : results) {
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    failures.insert(failures.end(), r.failures.begin(), r.failures.end());
  }
  json stars = json::array();
  bool stars_ok = true;
  std::map<std::size_t, long> a, b;
  for (std::size_t k = 1; k <= cap; ++k) {
    if (k >= 2) a[k] = star_bracket_a(k, cap);
    b[k] = star_bracket_b(k, cap);
  }
  stars_ok = a[2] == -1 && a[3] == 2 && b[1] == 1 && b[2] == -1;
  for (std::size_t k = 1; k <= cap; ++k) {
    bool rec_a = true, rec_b = true;
    if (k > 3) rec_a = a[k] == -static_cast<long>(k - 1) * (a[k - 1] + a[k - 2]);
    if (k > 2) rec_b = b[k] == a[k] + a[k - 1];
    stars_ok = stars_ok && rec_a && rec_b;
    stars.push_back({{"k", k}, {"A_k", k >= 2 ? json(a[k]) : json(nullptr)}, {"B_k", b[k]},
                     {"recurrence_A", rec_a}, {"recurrence_B", rec_b}});
  }
  const bool ok = failures.empty() && stars_ok;
  return {{{"ok", ok}, {"checked", rows.size()}, {"rows", rows}, {"failures", failures}, {"stars", stars},
           {"stars_ok", stars_ok}},
          ok ? 0 : 1};
}

json quadruple_json(const SymMatrixQ& w, const Quadruple& q) {
  const std::size_t i = q[0] - 1, j = q[1] - 1, k = q[2] - 1, l = q[3] - 1;
  return {{"quadruple", q},
          {"lhs", (w(i, j) + w(k, l)).to_string()},
          {"rhs", max(w(i, k) + w(j, l), w(i, l) + w(j, k)).to_string()}};
}

Outcome cmd_check_4pc(const std::string& path, unsigned jobs) {
  const SymMatrixQ w = SymMatrixQ::read_csv(path);
  const auto q = check_4pc(w, jobs);
  json report{{"n", w.size()}, {"ok", !q}, {"violation", nullptr}};
  if (q) report["violation"] = quadruple_json(w, *q);
  return {report, q ? 1 : 0};
}

json realization_json(const Realization& r) { return {{"tree", r.tree.to_text()}, {"phi", r.phi}}; }

Outcome cmd_realize(const std::string& path) {
  const SymMatrixQ d = SymMatrixQ::read_csv(path);
  try {
    const Realization r = realize_tree(d);
    return {{{"ok", true}, {"realization", realization_json(r)}}, 0, r.tree.to_text()};
  } catch (const FourPointViolation& v) {
    return {{{"ok", false}, {"violation", quadruple_json(d, v.quadruple())}}, 1};
  }
}

Outcome cmd_decompose(const std::string& path) {
  const SymMatrixQ w = SymMatrixQ::read_csv(path);
  try {
    const TreeMetricDecomposition dec = decompose(w);
    json p = json::array();
    for (const Rational& q : dec.p) p.push_back(q.get_str());
    const bool round_trip = recompose(dec.d, dec.p) == w;
    return {{{"ok", round_trip}, {"p", p}, {"D", matrix_json(dec.d)}, {"realization", realization_json(dec.realization)},
             {"recomposed_equal", round_trip}},
            round_trip ? 0 : 1};
  } catch (const FourPointViolation& v) {
    return {{{"ok", false}, {"reason", v.what()}, {"quadruple", v.quadruple()}}, 1};
  }
}

Outcome cmd_signature(const TreeSource& src, const std::string& xs_text, const std::string& tau_text) {
  const Tree t = src.load();
  const auto xs = xs_text.empty() ? t.vertices() : parse_vertices(xs_text);
  const Signature s = signature(t, xs);
  const Rational tau = parse_rational(tau_text);
  const Inertia in = inertia_numeric(tau_matrix(distance_matrix(t, xs), tau));
  json evidence = json::array();
  for (const Term& term : s.evidence) evidence.push_back(term_json(term));
  const bool consistent = in.positives == s.positives && in.negatives == s.negatives && in.zeros == 0;
  return {{{"X", join(xs)},
           {"positives", s.positives},
           {"negatives", s.negatives},
           {"evidence", evidence},
           {"inertia", {{"tau", tau.get_str()}, {"positives", in.positives}, {"negatives", in.negatives},
                        {"zeros", in.zeros}}},
           {"consistent", consistent}},
          consistent ? 0 : 1};
}

SetFunction build_function(const Tree& t, const std::string& kind, std::size_t k, std::optional<Vertex> root) {
  if (kind == "k") return k_dissimilarity(t, k);
  if (kind == "rooted") {
    if (!root) throw UsageError("--kind rooted needs --root");
    return rooted_k_dissimilarity(t, *root, k);
  }
  if (kind == "odd") return odd_dissimilarity(t);
  if (kind == "neg-odd") return odd_dissimilarity(t).negated();
  if (kind == "val-det") return val_det_map(t);
  throw UsageError("unknown --kind '" + kind + "'");
}

Outcome cmd_dissimilarity(const TreeSource& src, const std::string& kind, std::size_t k, std::optional<Vertex> root) {
  const Tree t = src.load();
  json report = set_function_json(build_function(t, kind, k, root));
  report["kind"] = kind;
  return {report, 0};
}

Outcome cmd_check_matroid(const TreeSource& src, const std::string& function_path, const std::string& kind,
                          std::size_t k, std::optional<Vertex> root, const ExchangeOptions& options) {
  std::optional<SetFunction> w;
  std::string used_kind = kind;
  if (!function_path.empty()) {
    if (!src.path.empty() || src.n != 0) throw UsageError("give either --function or a tree, not both");
    w = read_set_function(function_path);
    used_kind = "function";
  } else {
    w = build_function(src.load(), kind, k, root);
  }
  const ExchangeReport r = w->rank() ? check_valuated_matroid(*w, options) : check_delta_matroid(*w, options);
  json report = exchange_json(r);
  report["kind"] = used_kind;
  report["axiom"] = w->rank() ? "valuated matroid" : "valuated Delta-matroid";
  const bool exploratory = used_kind == "val-det";
  report["exploratory"] = exploratory;
  return {report, (r.ok || exploratory) ? 0 : 1};
}

Outcome cmd_represent_rooted(const TreeSource& src, Vertex root, std::size_t k, const std::string& window,
                             std::uint64_t seed) {
  const Tree t = src.load();
  RootedOptions options;
  options.seed = derive_seed(seed, 1);
  if (!window.empty()) options.window = parse_rational(window);
  const RootedReport r = represent_rooted(t, root, k, options);
  json rows = json::array();
  for (const RootedRow& row : r.rows) {
    rows.push_back({{"Y", join(row.y)},
                    {"D0", row.d0.get_str()},
                    {"det_M", row.det_m.to_string()},
                    {"schur_ok", row.schur_ok},
                    {"val_exact", row.val_exact.to_string()},
                    {"val_series", row.val_series ? json(row.val_series->to_string()) : json(nullptr)}});
  }
  json rmat = json::array();
  for (const auto& line : r.r) {
    json cells = json::array();
    for (const Series& s : line) cells.push_back(s.to_string());
    rmat.push_back(cells);
  }
  return {{{"ok", r.ok},
           {"exact_ok", r.exact_ok},
           {"negative_definite", r.negative_definite},
           {"series_ok", r.series_ok},
           {"sampled", r.sampled},
           {"ground", r.ground},
           {"root", root},
           {"k", k},
           {"window", r.window.get_str()},
           {"attempts", r.attempts},
           {"seed_used", r.seed_used},
           {"failure", r.failure},
           {"R", rmat},
           {"rows", rows}},
          r.ok ? 0 : 1};
}

Outcome cmd_represent_odd(const TreeSource& src) {
  const Tree t = src.load();
  const OddRepresentationReport r = represent_odd(t);
  return {{{"ok", r.ok},
           {"order", join(r.order)},
           {"checked", r.checked},
           {"mismatch", r.mismatch ? json(join(*r.mismatch)) : json(nullptr)},
           {"detail", r.detail}},
          r.ok ? 0 : 1};
}

Outcome cmd_hpp_check(const TreeSource& src, const std::string& matrix_path, const std::string& taus_text) {
  SymMatrixQ f;
  if (!matrix_path.empty()) {
    if (!src.path.empty() || src.n != 0) throw UsageError("give either --matrix or a tree, not both");
    f = SymMatrixQ::read_csv(matrix_path);
  } else {
    f = distance_matrix(src.load());
  }
  const auto taus = parse_rationals(taus_text);
  if (taus.empty()) throw UsageError("--tau needs at least one value");
  const HppCheck r = hpp_eigen_check(f, taus);
  json per_tau = json::array();
  for (const auto& [tau, in] : r.per_tau) {
    per_tau.push_back({{"tau", tau.get_str()}, {"positives", in.positives}, {"negatives", in.negatives},
                       {"zeros", in.zeros}});
  }
  json report{{"ok", r.ok}, {"four_point", r.four_point}, {"per_tau", per_tau},
              {"certificate", r.certificate ? quadruple_json(f, *r.certificate) : json(nullptr)},
              {"counterexample_tau", r.counterexample_tau ? json(r.counterexample_tau->get_str()) : json(nullptr)}};
  return {report, r.ok ? 0 : 1};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact minors and Pfaffians of tree-distance matrices, tree metrics and dissimilarity maps", "arbor"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string format = "json";
  unsigned jobs = 1;
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 256u));

  std::map<CLI::App*, std::function<Outcome()>> handlers;
  auto sub = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };

  // Option storage shared by the subcommands; each only reads its own.
  TreeSource src;
  Sweep sweep;
  std::string xs_text, matrix_path, function_path, kind = "k", window, tau_text = "10", taus_text = "10,100,1000";
  std::size_t k = 2, negatives = 20, max_x = 6, bracket_max_x = 5, cap = kDefaultCycleCap;
  std::optional<Vertex> root;
  bool reorder = false;
  ExchangeOptions exchange;

  auto* tree_gen = sub("tree-gen", "generate a random tree");
  src.attach(tree_gen);
  handlers[tree_gen] = [&] { return cmd_tree_gen(src); };

  auto* minor = sub("minor", "principal minor det A[X] by the forest formula and the oracle");
  src.attach(minor);
  minor->add_option("--X", xs_text, "comma-separated vertices (default: all)");
  handlers[minor] = [&] { return cmd_minor(src, xs_text, jobs); };

  auto* minor_verify = sub("minor-verify", "forest formula against the determinant for every X");
  sweep.attach(minor_verify);
  handlers[minor_verify] = [&] { return cmd_minor_verify(sweep, jobs); };

  auto* pf = sub("pfaffian", "Pf B[X] by the odd-edge formula and the oracle");
  src.attach(pf);
  pf->add_option("--X", xs_text, "ordered comma-separated vertices (default: all)");
  pf->add_flag("--nice", reorder, "reorder X by nice_order first");
  handlers[pf] = [&] { return cmd_pfaffian(src, xs_text, reorder); };

  auto* pf_verify = sub("pf-verify", "odd-edge formula against the Pfaffian for nicely-ordered X");
  sweep.attach(pf_verify);
  pf_verify->add_option("--negatives", negatives, "non-nicely-ordered counterexamples to collect");
  handlers[pf_verify] = [&] { return cmd_pf_verify(sweep, negatives, jobs); };

  auto* cycles = sub("cycles-verify", "cycle-partition expansions, cancellation and brackets");
  sweep.attach(cycles);
  cycles->add_option("--max-x", max_x, "largest |X| for the cycle expansions");
  cycles->add_option("--bracket-max-x", bracket_max_x, "largest |X| for the bracket check");
  cycles->add_option("--cap", cap, "cycle enumeration cap");
  handlers[cycles] = [&] { return cmd_cycles_verify(sweep, max_x, bracket_max_x, cap, jobs); };

  auto* fourpc = sub("check-4pc", "four-point condition on a matrix");
  fourpc->add_option("--matrix", matrix_path, "CSV matrix")->required();
  handlers[fourpc] = [&] { return cmd_check_4pc(matrix_path, jobs); };

  auto* realize = sub("realize", "realize a tree metric as a weighted tree");
  realize->add_option("--matrix", matrix_path, "CSV matrix")->required();
  handlers[realize] = [&] { return cmd_realize(matrix_path); };

  auto* decomp = sub("decompose", "split W into a tree metric plus a potential");
  decomp->add_option("--matrix", matrix_path, "CSV matrix")->required();
  handlers[decomp] = [&] { return cmd_decompose(matrix_path); };

  auto* sig = sub("signature", "signature of A[X] from nested leading minors");
  src.attach(sig);
  sig->add_option("--X", xs_text, "comma-separated vertices (default: all)");
  sig->add_option("--tau", tau_text, "value of t for the numeric inertia cross-check");
  handlers[sig] = [&] { return cmd_signature(src, xs_text, tau_text); };

  auto* dis = sub("dissimilarity", "tabulate a dissimilarity map");
  src.attach(dis);
  dis->add_option("--kind", kind, "k | rooted | odd | neg-odd | val-det");
  dis->add_option("--k", k, "subset size");
  dis->add_option("--root", root, "root vertex for --kind rooted");
  handlers[dis] = [&] { return cmd_dissimilarity(src, kind, k, root); };

  auto* matroid = sub("check-matroid", "exchange axioms for a dissimilarity map or a function file");
  src.attach(matroid);
  matroid->add_option("--function", function_path, "JSON set function");
  matroid->add_option("--kind", kind, "k | rooted | odd | neg-odd | val-det");
  matroid->add_option("--k", k, "subset size");
  matroid->add_option("--root", root, "root vertex for --kind rooted");
  matroid->add_option("--cap", exchange.exhaustive_cap, "largest number of (X, Y) pairs checked exhaustively");
  matroid->add_option("--samples", exchange.samples, "pairs drawn in sampled mode");
  handlers[matroid] = [&] {
    exchange.jobs = jobs;
    exchange.seed = derive_seed(src.seed, 2);
    return cmd_check_matroid(src, function_path, kind, k, root, exchange);
  };

  auto* rooted = sub("represent-rooted", "Puiseux representation of the rooted k-dissimilarity map");
  src.attach(rooted);
  rooted->add_option("--root", root, "root vertex")->required();
  rooted->add_option("--k", k, "subset size");
  rooted->add_option("--window", window, "series truncation window (default 4 * exponent spread)");
  handlers[rooted] = [&] { return cmd_represent_rooted(src, *root, k, window, src.seed); };

  auto* odd = sub("represent-odd", "odd-dissimilarity map through Pfaffians of B and B^v");
  src.attach(odd);
  handlers[odd] = [&] { return cmd_represent_odd(src); };

  auto* hpp = sub("hpp-check", "at most one positive eigenvalue of (tau^f_ij), with the 4PC");
  src.attach(hpp);
  hpp->add_option("--matrix", matrix_path, "CSV matrix f");
  hpp->add_option("--tau", taus_text, "comma-separated tau grid");
  handlers[hpp] = [&] { return cmd_hpp_check(src, matrix_path, taus_text); };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto* s : app.get_subcommands()) out << s->help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const Outcome outcome = handlers.at(app.get_subcommands().front())();
    emit(outcome, format, out);
    return outcome.code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const PrecisionError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::logic_error& e) {
    err << "internal check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace arbor::cli
