#include "doctest.h"

#include <cmath>

#include "lamplighter/eigenbasis.hpp"
#include "lamplighter/percolation.hpp"
#include "lamplighter/verify.hpp"

using namespace lamplighter;

namespace {

Configuration config(std::initializer_list<std::pair<VertexId, Lamp>> lamps) {
  Configuration c;
  for (auto [s, l] : lamps) c.set(s, l);
  return c;
}

Animal animal_of(const Graph& g, VertexId root, std::vector<VertexId> vertices) {
  Animal a;
  a.root = root;
  a.vertices = std::move(vertices);
  std::sort(a.vertices.begin(), a.vertices.end());
  a.boundary = boundary(g, a.vertices);
  return a;
}

ConfigVector random_config_vector(std::span<const VertexId> window, int m, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  ConfigVector v;
  for (const Configuration& eta : window_configurations(window, m)) {
    if (rng.uniform() < 0.6) v[eta] = Amplitude(rng.uniform() - 0.5, rng.uniform() - 0.5);
  }
  return v;
}

double distance(const ConfigVector& a, const ConfigVector& b) {
  ConfigVector d = a;
  for (const auto& [eta, amp] : b) d[eta] -= amp;
  return std::sqrt(squared_norm(d).real());
}

}  // namespace

TEST_CASE("theta_site examples") {
  auto e = basis_config<Rational>(Configuration{});
  auto t = theta_site(e, 3, 2);
  REQUIRE(t.size() == 2);
  CHECK(t.at(Configuration{}) == Rational(1, 2));
  CHECK(t.at(config({{3, 1}})) == Rational(1, 2));
  CHECK(theta_site(t, 3, 2) == t);
  for (int m : {2, 3, 5}) {
    auto tm = theta_site(basis_config<Rational>(Configuration{}), 0, m);
    CHECK(tm.at(Configuration{}) == Rational(1, m));
  }
}

TEST_CASE("theta_site is idempotent and self-adjoint on random vectors") {
  std::vector<VertexId> window{0, 2, 5};
  for (int m : {2, 3}) {
    for (std::uint64_t s = 1; s <= 4; ++s) {
      auto u = random_config_vector(window, m, s);
      auto v = random_config_vector(window, m, s + 50);
      for (VertexId site : window) {
        auto tu = theta_site(u, site, m);
        CHECK(distance(theta_site(tu, site, m), tu) <= 1e-14);
        CHECK(std::abs(inner(tu, v) - inner(u, theta_site(v, site, m))) <= 1e-14);
      }
    }
  }
}

TEST_CASE("theta_animal examples") {
  Graph k2 = named_graph("K2");
  auto spec = ProjectionSpec::of(animal_of(k2, 0, {0}), 2);
  CHECK(squared_norm(theta_animal(basis_config<Rational>(Configuration{}), spec)) == Rational(1, 4));

  Graph g = build_graph("grid:3x3");
  for (int m : {2, 3}) {
    auto a = animal_of(g, 4, {4, 5});
    auto sp = ProjectionSpec::of(a, m);
    auto window = sp.sites();
    for (std::uint64_t s = 1; s <= 3; ++s) {
      auto v = random_config_vector(window, m, s);
      auto once = theta_animal(v, sp);
      CHECK(distance(theta_animal(once, sp), once) <= 1e-14);
    }
  }
}

TEST_CASE("distinct overlapping animals annihilate, disjoint ones need not") {
  Graph p3 = named_graph("P3");
  auto a = animal_of(p3, 1, {0, 1});
  auto b = animal_of(p3, 1, {1});
  auto c = animal_of(p3, 1, {0, 1, 2});
  for (int m : {2, 3}) {
    CHECK(annihilation_residual(a, b, m) <= 1e-14);
    CHECK(annihilation_residual(a, c, m) <= 1e-14);
    CHECK(annihilation_residual(b, c, m) <= 1e-14);
    // Theta is a projection, so it does not annihilate itself; A={a,b}, dA={c}
    const double mm = m;
    CHECK(annihilation_residual(a, a, m) == doctest::Approx(std::sqrt((mm - 1) / (mm * mm * mm))));
  }
  for (int m : {2, 3}) {
    for (const auto& [u, v] : {std::pair{a, b}, {a, c}, {b, c}, {a, a}, {c, c}}) {
      CHECK(annihilation_residual(u, v, m) == doctest::Approx(annihilation_residual_dense(u, v, m)).epsilon(1e-12));
    }
  }
  Graph c6 = build_graph("cycle:6");
  auto far1 = animal_of(c6, 0, {0});
  auto far2 = animal_of(c6, 3, {3});
  CHECK(annihilation_residual(far1, far2, 2) > 0.1);
  CHECK(annihilation_residual(far1, far2, 2) == doctest::Approx(annihilation_residual_dense(far1, far2, 2)));
}

TEST_CASE("range_basis examples") {
  Graph k2 = named_graph("K2");
  std::vector<VertexId> xy{0, 1};

  auto whole = range_basis(ProjectionSpec::of(animal_of(k2, 0, {0, 1}), 2), xy);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].size() == 4);
  for (const auto& [eta, amp] : whole[0]) CHECK(std::abs(amp - Amplitude(0.5)) <= 1e-15);

  auto edge = range_basis(ProjectionSpec::of(animal_of(k2, 0, {0}), 2), xy);
  REQUIRE(edge.size() == 1);
  CHECK(std::abs(squared_norm(edge[0]) - 1.0) <= 1e-15);
  CHECK(std::abs(edge[0].at(Configuration{}) - Amplitude(0.5)) <= 1e-15);
  CHECK(std::abs(edge[0].at(config({{0, 1}})) - Amplitude(0.5)) <= 1e-15);
  CHECK(std::abs(edge[0].at(config({{1, 1}})) - Amplitude(-0.5)) <= 1e-15);
  CHECK(std::abs(edge[0].at(config({{0, 1}, {1, 1}})) - Amplitude(-0.5)) <= 1e-15);

  CHECK(range_basis(ProjectionSpec::of(animal_of(k2, 0, {0}), 3), xy).size() == 2);

  std::vector<VertexId> small{0};
  CHECK_THROWS_AS(range_basis(ProjectionSpec::of(animal_of(k2, 0, {0}), 2), small), std::invalid_argument);
}

TEST_CASE("range_basis is orthonormal with the predicted dimension") {
  Graph g = build_graph("grid:3x3");
  for (int m : {2, 3}) {
    for (const Animal& a : enumerate_animals(g, 4, 3)) {
      auto spec = ProjectionSpec::of(a, m);
      auto window = spec.sites();
      // one extra site outside A and dA when there is one
      for (VertexId v = 0; v < g.size(); ++v) {
        if (!std::binary_search(window.begin(), window.end(), v)) {
          window.push_back(v);
          break;
        }
      }
      std::sort(window.begin(), window.end());
      if (window.size() > 7 && m == 3) continue;
      auto basis = range_basis(spec, window);
      std::size_t expected = 1;
      for (std::size_t i = 0; i < a.boundary_size(); ++i) expected *= static_cast<std::size_t>(m - 1);
      for (std::size_t i = 0; i < window.size() - a.size() - a.boundary_size(); ++i) expected *= static_cast<std::size_t>(m);
      CHECK(basis.size() == expected);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(distance(theta_animal(basis[i], spec), basis[i]) <= 1e-12);
        for (std::size_t j = i; j < basis.size(); ++j) {
          CHECK(std::abs(inner(basis[i], basis[j]) - Amplitude(i == j ? 1.0 : 0.0)) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("projector rank law on windows up to 8 sites") {
  Graph g = build_graph("cycle:8");
  for (int m : {2, 3}) {
    for (const Animal& a : enumerate_animals(g, 0, 4)) {
      auto spec = ProjectionSpec::of(a, m);
      const std::vector<VertexId> core = spec.sites();
      std::vector<VertexId> window = core;
      const std::size_t limit = m == 2 ? 8 : 6;
      for (VertexId v = 0; v < g.size() && window.size() < limit; ++v) {
        if (!std::binary_search(core.begin(), core.end(), v)) window.push_back(v);
      }
      std::sort(window.begin(), window.end());
      std::size_t expected = 1;
      for (std::size_t i = 0; i < a.boundary_size(); ++i) expected *= static_cast<std::size_t>(m - 1);
      for (std::size_t i = 0; i < window.size() - a.size() - a.boundary_size(); ++i) expected *= static_cast<std::size_t>(m);
      CHECK(matrix_rank(projector_matrix(spec, window)) == expected);
    }
  }
}

TEST_CASE("norm law holds exactly for every window configuration") {
  Graph g = build_graph("grid:3x3");
  for (int m : {2, 3}) {
    for (const Animal& a : enumerate_animals(g, 0, 3)) {
      auto spec = ProjectionSpec::of(a, m);
      Rational law(1);
      for (std::size_t i = 0; i < a.size(); ++i) law /= m;
      for (std::size_t i = 0; i < a.boundary_size(); ++i) law *= Rational(m - 1, m);
      for (const Configuration& eta : window_configurations(spec.sites(), m)) {
        CHECK(squared_norm(theta_animal(basis_config<Rational>(eta), spec)) == law);
      }
    }
  }
}

TEST_CASE("K2 eigenfunctions of the whole graph") {
  Graph k2 = named_graph("K2");
  LamplighterOperator op(WalkKernel(k2), 2);
  auto a = animal_of(k2, 0, {0, 1});
  std::vector<VertexId> window{0, 1};
  auto fs = build_eigenfunctions(a, op.kernel(), 2, window);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].lambda == doctest::Approx(-1.0));
  CHECK(fs[1].lambda == doctest::Approx(1.0));
  for (const auto& f : fs) {
    CHECK(verify_eigen(f, op) <= 1e-14);
    CHECK(f.vector.support_size() == 8);
    for (const auto& e : f.vector.entries()) CHECK(std::abs(std::abs(e.amp) - 0.5 / std::sqrt(2.0)) <= 1e-15);
  }
  // linearity and perturbation sanity
  Eigenfunction doubled{fs[0].lambda, fs[0].vector.scaled(2.0)};
  CHECK(verify_eigen(doubled, op) <= 2e-14);
  Eigenfunction shifted{fs[0].lambda + 0.1, fs[0].vector};
  CHECK(verify_eigen(shifted, op) >= 0.1 * norm(fs[0].vector, op.reversible_weights()) - 1e-10);
}

TEST_CASE("K2 single site animal has eigenvalue 0 and T~ kills it") {
  Graph k2 = named_graph("K2");
  LamplighterOperator op(WalkKernel(k2), 2);
  auto a = animal_of(k2, 0, {0});
  std::vector<VertexId> window{0, 1};
  auto fs = build_eigenfunctions(a, op.kernel(), 2, window);
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].lambda == 0.0);
  CHECK(apply(op, fs[0].vector).empty());
}

TEST_CASE("P3 edge animal has eigenvalues +-1/sqrt2") {
  Graph p3 = named_graph("P3");
  LamplighterOperator op(WalkKernel(p3), 2);
  auto a = animal_of(p3, 0, {0, 1});
  std::vector<VertexId> window{0, 1, 2};
  auto fs = build_eigenfunctions(a, op.kernel(), 2, window);
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].lambda == doctest::Approx(-1 / std::sqrt(2.0)));
  CHECK(fs[1].lambda == doctest::Approx(1 / std::sqrt(2.0)));
  for (const auto& f : fs) CHECK(verify_eigen(f, op) <= 1e-12);
}

TEST_CASE("eigenfunctions across animals form an orthonormal system") {
  for (const char* spec : {"P3", "cycle:4", "cycle:5"}) {
    Graph g = named_graph(spec);
    LamplighterOperator op(WalkKernel(g), 2);
    std::vector<Eigenfunction> all;
    for (const Animal& a : enumerate_animals(g, 0, 4)) {
      auto window = ProjectionSpec::of(a, 2).sites();
      for (auto& f : build_eigenfunctions(a, op.kernel(), 2, window)) {
        CHECK(verify_eigen(f, op) <= 1e-12);
        all.push_back(std::move(f));
      }
    }
    CHECK(gram_deviation(all, op.reversible_weights()) <= 1e-10);
  }
}

TEST_CASE("intertwining on K2 and P3") {
  Graph k2 = named_graph("K2");
  LamplighterOperator op(WalkKernel(k2), 2);
  std::vector<VertexId> xy{0, 1};
  auto r = intertwine_check(animal_of(k2, 0, {0, 1}), op, xy, 1000);
  CHECK(r.checked == 8);
  CHECK(r.max_residual <= 1e-15);
  CHECK(r.max_commutator <= 1e-15);

  auto single = intertwine_check(animal_of(k2, 0, {0}), op, xy, 1000);
  CHECK(single.checked == 8);
  CHECK(single.max_outside <= 1e-15);
  CHECK(single.max_residual <= 1e-15);

  Graph p3 = named_graph("P3");
  LamplighterOperator op3(WalkKernel(p3), 3);
  std::vector<VertexId> abc{0, 1, 2};
  auto r3 = intertwine_check(animal_of(p3, 0, {0, 1}), op3, abc, 100000);
  CHECK(r3.checked == 27 * 3);
  CHECK(r3.max_residual <= 1e-12);
  CHECK(r3.max_commutator <= 1e-12);
  CHECK(r3.max_outside <= 1e-12);

  auto sampled = intertwine_check(animal_of(p3, 0, {0, 1}), op3, abc, 10, 4);
  CHECK(sampled.checked == 10);
}

TEST_CASE("completeness probe examples") {
  auto k2 = completeness_probe(named_graph("K2"), 0, 2, 2);
  CHECK(k2.mass == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(k2.max_deviation <= 1e-12);
  CHECK(k2.root_conditioned == doctest::Approx(1.0));
  CHECK(k2.residual == 0.0);

  Graph line = materialize(build_graph("line"), {0}, 20);
  auto l = completeness_probe(line, 0, 2, 20);
  CHECK(std::abs(l.mass - 0.5) <= 1e-4);
  CHECK(l.max_deviation <= 1e-12);
  CHECK(std::abs(l.mass + l.residual - 0.5) <= 1e-12);

  Graph g = build_graph("grid:3x3");
  for (int m : {2, 3, 4}) {
    auto one = completeness_probe(g, 4, m, 1);
    CHECK(one.animals == 1);
    CHECK(one.mass == doctest::Approx((1.0 / m) * std::pow(1 - 1.0 / m, 4)));
  }
}
