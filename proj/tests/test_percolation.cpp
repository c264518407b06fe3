#include "doctest.h"

#include <cmath>
#include <omp.h>

#include "lamplighter/lamplighter.hpp"
#include "lamplighter/percolation.hpp"
#include "lamplighter/verify.hpp"
#include "oracles.hpp"

using namespace lamplighter;

TEST_CASE("counter rng streams are deterministic and distinct") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
  }
  CounterRng u(1, 0);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    mean += v;
  }
  CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sample_cluster extremes") {
  Graph g = build_graph("grid:3x3");
  CounterRng rng(1, 0);
  auto all = sample_cluster(g, 4, 1.0, 10, rng);
  CHECK(all.root_open);
  CHECK(all.cluster.size() == 9);
  CHECK(all.cluster.front() == 4);
  auto none = sample_cluster(g, 4, 0.0, 10, rng);
  CHECK_FALSE(none.root_open);
  CHECK(none.cluster.empty());

  Graph z = materialize(build_graph("z2"), {0, 0}, 3);
  auto ball3 = sample_cluster(z, 0, 1.0, 3, rng);
  CHECK(ball3.cluster.size() == 25);
  auto ball2 = sample_cluster(z, 0, 1.0, 2, rng);
  CHECK(ball2.cluster.size() == 13);
  auto capped = sample_cluster(z, 0, 1.0, 3, rng, 10);
  CHECK(capped.truncated);
  CHECK(capped.cluster.size() <= 10);
  CHECK_THROWS_AS(sample_cluster(z, 0, 1.0, 4, rng), GraphError);
}

TEST_CASE("sampled clusters are connected and contain the root") {
  Graph z = materialize(build_graph("z2"), {0, 0}, 6);
  for (std::uint64_t s = 0; s < 200; ++s) {
    CounterRng rng(11, s);
    auto c = sample_cluster(z, 0, 0.55, 6, rng);
    if (!c.root_open) continue;
    CHECK(c.cluster.front() == 0);
    std::vector<VertexId> v = c.cluster;
    CHECK(is_connected(z, v));
  }
}

TEST_CASE("K2 cluster law: P[C = {x,y}] = 1/4") {
  Graph k2 = named_graph("K2");
  const int samples = 100000;
  int both = 0;
  for (int i = 0; i < samples; ++i) {
    CounterRng rng(42, static_cast<std::uint64_t>(i));
    if (sample_cluster(k2, 0, 0.5, 1, rng).cluster.size() == 2) ++both;
  }
  double freq = static_cast<double>(both) / samples;
  CHECK(std::abs(freq - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / samples));
}

TEST_CASE("mc_expected_return basics") {
  Graph k2 = named_graph("K2");
  auto r = mc_expected_return(k2, 0, 0.5, 4, 100000, 7);
  CHECK(r.estimate[0] == 1.0);
  CHECK(r.standard_error[0] == 0.0);
  CHECK(r.estimate[1] == 0.0);
  CHECK(r.estimate[3] == 0.0);
  CHECK(std::abs(r.estimate[2] - 0.25) <= 3 * r.standard_error[2]);
  CHECK(r.samples == 100000);
  CHECK(r.capped == 0);
  CHECK(r.seed == 7);

  Graph z = materialize(build_graph("z2"), {0, 0}, 3);
  auto one = mc_expected_return(z, 0, 0.4, 1, 1000, 3);
  CHECK(one.estimate[1] == 0.0);
  CHECK_THROWS_AS(mc_expected_return(z, 0, 0.4, 8, 10, 3), GraphError);
  CHECK_THROWS_AS(mc_expected_return(k2, 0, 0.5, 2, 0, 3), std::invalid_argument);
}

TEST_CASE("mc is bit-identical across reruns, thread counts and the serial reference") {
  Graph g = build_graph("cycle:6");
  auto a = mc_expected_return(g, 0, 0.6, 6, 20000, 99);
  auto b = mc_expected_return(g, 0, 0.6, 6, 20000, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.standard_error == b.standard_error);
  int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  auto c = mc_expected_return(g, 0, 0.6, 6, 20000, 99);
  omp_set_num_threads(threads > 1 ? threads : 3);
  auto d = mc_expected_return(g, 0, 0.6, 6, 20000, 99);
  omp_set_num_threads(threads);
  auto s = reference::mc_expected_return(g, 0, 0.6, 6, 20000, 99);
  CHECK(a.estimate == c.estimate);
  CHECK(a.estimate == d.estimate);
  CHECK(a.estimate == s.estimate);
  CHECK(a.standard_error == s.standard_error);
}

TEST_CASE("exhaustive site states equal the animal sum and MC lands within 4 SE") {
  std::vector<GraphCase> cases{make_case("K2", {}, 0), make_case("P3", std::string("b"), 0),
                               make_case("cycle:4", {}, 0), make_case("grid:3x3", std::string("1,1"), 0),
                               make_case("cycle:7", {}, 0)};
  for (const GraphCase& gc : cases) {
    for (double p : {0.3, 0.5, 0.7}) {
      auto exact = oracle::exhaustive_expected_return(gc.graph, gc.root, p, 6);
      auto sum = expected_return_animal_sum<double>(gc.graph, gc.root, p, 6, static_cast<int>(gc.graph.size()));
      CHECK(sum.error_bound <= 1e-15);
      for (std::size_t n = 0; n < exact.size(); ++n) CHECK(std::abs(exact[n] - sum.values[n]) <= 1e-12);
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto mc = mc_expected_return(gc.graph, gc.root, p, 6, 20000, seed);
        for (std::size_t n = 1; n < exact.size(); ++n) {
          CHECK(std::abs(mc.estimate[n] - exact[n]) <= 4 * mc.standard_error[n] + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("expected two-step return is nondecreasing in p") {
  for (const char* spec : {"K2", "P3", "cycle:4"}) {
    Graph g = named_graph(spec);
    double prev = -1.0;
    for (int i = 1; i <= 9; ++i) {
      double p = i / 10.0;
      double v = expected_return_animal_sum<double>(g, 0, p, 2, static_cast<int>(g.size())).values[2];
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("cluster return probabilities of the full cycle") {
  Graph g = build_graph("cycle:4");
  WalkKernel k(g);
  ClusterSample s{true, {0, 1, 2, 3}, false};
  auto r = cluster_return_probabilities(k, s, 0, 4);
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.5);
  CHECK(r[4] == 0.5);
  ClusterSample closed{false, {}, false};
  auto z = cluster_return_probabilities(k, closed, 0, 3);
  CHECK(z == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("finite cluster mass below threshold is about p") {
  Graph z = materialize(build_graph("z2"), {0, 0}, 30);
  auto m = finite_cluster_mass_mc(z, 0, 0.3, 30, 4000, 5);
  CHECK(std::abs(m.estimate - 0.3) <= 4 * m.standard_error + 1e-3);
}
