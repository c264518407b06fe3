#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lamplighter/graph.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

/// Finite connected vertex set containing `root`, with its vertex boundary.
struct Animal {
  VertexId root = 0;
  std::vector<VertexId> vertices;  // sorted
  std::vector<VertexId> boundary;  // sorted

  std::size_t size() const { return vertices.size(); }
  std::size_t boundary_size() const { return boundary.size(); }
  bool contains(VertexId v) const;

  friend bool operator==(const Animal&, const Animal&) = default;
};

/// Vertices outside `a` adjacent to some vertex of `a`, sorted.
/// Throws GraphError when `a` touches a truncated frontier vertex, whose
/// neighbourhood is incomplete.
std::vector<VertexId> boundary(const Graph& g, std::span<const VertexId> a);

bool is_connected(const Graph& g, std::span<const VertexId> a);

inline constexpr std::size_t default_animal_budget = 20'000'000;

/// All connected vertex sets containing `root` with at most `max_size`
/// vertices, each exactly once, ordered by size and then lexicographically by
/// sorted vertex ids. Work is split over the root's neighbours with OpenMP.
std::vector<Animal> enumerate_animals(const Graph& g, VertexId root, int max_size,
                                      std::size_t budget = default_animal_budget);

double animal_probability(const Animal& a, double p);
Rational animal_probability(const Animal& a, const Rational& p);

/// Number of animals per size, index 0 unused.
std::vector<std::size_t> counts_by_size(std::span<const Animal> animals, int max_size);

struct ResidualMass {
  double residual = 0.0;    // total - enumerated, never below -1e-12
  double total = 0.0;       // sum over all finite animals containing the root
  double enumerated = 0.0;  // sum over the enumerated animals
  bool exact = true;        // false when `total` is a Monte Carlo estimate
  std::string method;
};

/// Mass of all finite animals at the root: P[root open, cluster finite].
/// Finite graphs are summed exhaustively; line, z2 and regular trees use
/// their percolation thresholds (below threshold the mass is p).
ResidualMass residual_mass(const Graph& g, VertexId root, double p, std::span<const Animal> enumerated,
                           int max_size);
ResidualMass residual_mass(const Graph& g, VertexId root, double p, int max_size);

/// Known site-percolation threshold of Z^2, used to decide sub-criticality.
inline constexpr double z2_site_threshold = 0.592746;

namespace reference {
/// Single-threaded enumeration, kept to check the parallel one.
std::vector<Animal> enumerate_animals(const Graph& g, VertexId root, int max_size,
                                      std::size_t budget = default_animal_budget);
}  // namespace reference

}  // namespace lamplighter
