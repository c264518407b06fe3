#include "doctest.h"

#include "lamplighter/verify.hpp"

using namespace lamplighter;

namespace {

std::vector<GraphCase> cases(std::initializer_list<const char*> specs) {
  std::vector<GraphCase> out;
  for (const char* s : specs) out.push_back(make_case(s, std::nullopt, 2));
  return out;
}

}  // namespace

TEST_CASE("make_case on finite and infinite graphs") {
  auto k2 = make_case("K2", std::string("y"), 0);
  CHECK(k2.graph.name(k2.root) == "y");
  CHECK_THROWS_AS(make_case("K2", std::string("z"), 0), GraphError);

  auto closed = make_case("z2", std::nullopt, 2);
  CHECK(closed.graph.size() == 13);
  CHECK_FALSE(closed.graph.has_frontier());
  CHECK(closed.label == "z2/ball2");

  auto host = make_case("z2", std::string("3,1"), 2, false);
  CHECK(host.graph.has_frontier());
  CHECK(host.graph.name(host.root) == "3,1");
  CHECK(host.graph.weight(host.root) == 4.0);
}

TEST_CASE("theorem1 suite passes and is exact") {
  const std::vector<int> ms{2, 3};
  auto rep = verify_theorem1(cases({"K2", "P3", "cycle:4"}), ms, 6);
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 12);
  auto j = rep.to_json();
  CHECK(j["verdict"] == "pass");
  CHECK(j["checks"][0]["detail"]["config_space"][2] == "1/4");
}

TEST_CASE("theorem1 detects p away from 1/m") {
  const std::vector<int> ms{2};
  auto rep = verify_theorem1(cases({"K2"}), ms, 4, Rational(1, 3));
  CHECK_FALSE(rep.passed());
  CHECK(rep.to_json()["verdict"] == "fail");
}

TEST_CASE("theorem1 refuses truncated graphs") {
  std::vector<GraphCase> c{make_case("z2", std::nullopt, 2, false)};
  const std::vector<int> ms{2};
  CHECK_THROWS_AS(verify_theorem1(c, ms, 4), GraphError);
}

TEST_CASE("intertwine, orthogonality and eigenbasis suites pass") {
  CHECK(verify_intertwine(cases({"K2", "P3"}), 2, 3).passed());
  CHECK(verify_intertwine(cases({"P3"}), 3, 2).passed());
  auto lemma = verify_lemma_orthogonality(cases({"P3", "cycle:4"}), 2, 3);
  CHECK(lemma.passed());
  CHECK(lemma.checks[0].detail["overlapping_pairs"].get<std::size_t>() > 0);
  auto eig = verify_eigenbasis(cases({"P3", "cycle:4"}), 2, 4);
  CHECK(eig.passed());
  CHECK(eig.checks.size() == 8);
}

TEST_CASE("completeness suite only reports") {
  std::vector<GraphCase> c{make_case("line", std::nullopt, 12, false)};
  auto rep = verify_completeness(c, 2, 12);
  CHECK(rep.passed());
  auto j = rep.to_json();
  CHECK(j["verdict"] == "report-only");
  CHECK(j["checks"][0]["detail"]["mass"].get<double>() == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(j["checks"][0]["detail"]["claimed_total"] == 1.0);
}
