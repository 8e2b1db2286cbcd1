#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "arbor/cli.hpp"
#include "arbor/tree.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
  json parsed() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = arbor::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(ARBOR_TEST_DATA) + "/" + name; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("minor on a path") {
  auto r = run({"minor", "--tree", data("path4.tree"), "--X", "1,3"});
  REQUIRE(r.code == 0);
  auto j = r.parsed();
  CHECK(j["formula"] == "-t^4 + 1");
  CHECK(j["equal"] == true);
  CHECK(j["leading"]["exp"] == "4");
}

TEST_CASE("minor-verify sweep is deterministic across job counts") {
  auto a = run({"minor-verify", "--n", "6", "--trees", "50", "--seed", "7"});
  auto b = run({"--jobs", "3", "minor-verify", "--n", "6", "--trees", "50", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == run({"minor-verify", "--n", "6", "--trees", "50", "--seed", "7"}).out);
}

TEST_CASE("check-4pc reports the C4 quadruple") {
  auto r = run({"check-4pc", "--matrix", data("c4.csv")});
  CHECK(r.code == 1);
  auto j = r.parsed();
  CHECK(j["ok"] == false);
  CHECK(j["violation"]["quadruple"] == json::array({1, 3, 2, 4}));
  CHECK(j["violation"]["lhs"] == "4");
  CHECK(j["violation"]["rhs"] == "2");
}

TEST_CASE("realize and decompose") {
  auto r = run({"realize", "--matrix", data("star3.csv")});
  REQUIRE(r.code == 0);
  auto t = arbor::Tree::parse(r.parsed()["realization"]["tree"].get<std::string>());
  CHECK(t.vertex_count() == 4);
  CHECK(run({"realize", "--matrix", data("c4.csv")}).code == 1);
  CHECK(run({"decompose", "--matrix", data("star3.csv")}).code == 0);
}

TEST_CASE("pfaffian of a crossing order") {
  auto r = run({"pfaffian", "--tree", data("path4.tree"), "--X", "1,3,2,4"});
  REQUIRE(r.code == 0);
  auto j = r.parsed();
  CHECK(j["nicely_ordered"] == false);
  CHECK(j["oracle"] == "2*t^4 - t^2");
  CHECK(j["overused_edge"] == json::array({2, 3}));
  auto nice = run({"pfaffian", "--tree", data("path4.tree"), "--X", "1,3,2,4", "--nice"});
  REQUIRE(nice.code == 0);
  CHECK(nice.parsed()["formula"] == "t^2");
}

TEST_CASE("pf-verify and cycles-verify pass on small sweeps") {
  auto pf = run({"pf-verify", "--n", "6", "--trees", "4", "--seed", "1"});
  CHECK(pf.code == 0);
  CHECK(pf.parsed()["failures"].empty());
  CHECK_FALSE(pf.parsed()["negatives"].empty());
  CHECK(run({"cycles-verify", "--n", "5", "--trees", "2", "--seed", "3"}).code == 0);
}

TEST_CASE("signature of a star") {
  auto r = run({"signature", "--tree", data("star.tree"), "--X", "1,2,3"});
  REQUIRE(r.code == 0);
  auto j = r.parsed();
  CHECK(j["positives"] == 1);
  CHECK(j["negatives"] == 2);
  CHECK(j["consistent"] == true);
}

TEST_CASE("dissimilarity as csv") {
  auto r = run({"--format", "csv", "dissimilarity", "--tree", data("path4.tree"), "--kind", "k", "--k", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "subset,value\n\"1,4\",3\n");
}

TEST_CASE("check-matroid") {
  CHECK(run({"check-matroid", "--tree", data("path4.tree"), "--kind", "odd"}).code == 0);
  CHECK(run({"check-matroid", "--tree", data("star.tree"), "--kind", "k", "--k", "2"}).code == 0);
  auto bad = run({"check-matroid", "--function", data("bad_matroid.json")});
  CHECK(bad.code == 1);
  auto v = bad.parsed()["violation"];
  CHECK(v["X"] == "1,2");
  CHECK(v["Y"] == "3,4");
  auto explore = run({"check-matroid", "--tree", data("star.tree"), "--kind", "val-det"});
  CHECK(explore.code == 0);
  CHECK(explore.parsed()["exploratory"] == true);
}

TEST_CASE("representations") {
  auto rooted = run({"represent-rooted", "--tree", data("star.tree"), "--root", "0", "--k", "2"});
  REQUIRE(rooted.code == 0);
  CHECK(rooted.parsed()["ok"] == true);
  CHECK(rooted.parsed()["exact_ok"] == true);
  CHECK(rooted.out == run({"represent-rooted", "--tree", data("star.tree"), "--root", "0", "--k", "2"}).out);

  auto odd = run({"represent-odd", "--tree", data("path4.tree")});
  REQUIRE(odd.code == 0);
  CHECK(odd.parsed()["checked"] == 8);
}

TEST_CASE("hpp-check") {
  CHECK(run({"hpp-check", "--matrix", data("c4.csv")}).code == 1);
  CHECK(run({"hpp-check", "--tree", data("path4.tree")}).code == 0);
}

TEST_CASE("tree-gen text round-trips") {
  auto r = run({"--format", "text", "tree-gen", "--n", "7", "--seed", "11", "--weights", "rational"});
  REQUIRE(r.code == 0);
  auto t = arbor::Tree::parse(r.out);
  CHECK(t.vertex_count() == 7);
  CHECK(r.out == run({"--format", "text", "tree-gen", "--n", "7", "--seed", "11", "--weights", "rational"}).out);
}

TEST_CASE("usage errors exit 2") {
  auto bad = run({"minor", "--tree", data("bad.tree")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(run({"pfaffian", "--tree", data("path4.tree"), "--X", "1,2,3"}).code == 2);
  CHECK(run({"minor", "--tree", data("path4.tree"), "--n", "5"}).code == 2);
  CHECK(run({"minor", "--tree", data("path4.tree"), "--X", "1,9"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--format", "csv", "realize", "--matrix", data("star3.csv")}).code == 2);
  CHECK(run({"check-4pc", "--matrix", data("missing.csv")}).code == 2);
  CHECK(run({"check-4pc", "--matrix", data("asym.csv")}).code == 2);
}

TEST_CASE("help exits 0") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("minor-verify") != std::string::npos);
}

}  // TEST_SUITE
