#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lamplighter/graph.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

/// A graph together with the root every suite works from.
struct GraphCase {
  std::string label;
  Graph graph;
  VertexId root = 0;
};

/// `K2` and `P3` (path a-b-c) by name, anything else through build_graph.
Graph named_graph(std::string_view spec);

/// Case built from a spec. Finite graphs are used as they are. Infinite ones
/// are cut to the ball of `radius` around the root: as a finite graph of its
/// own when `closed`, otherwise with host weights and a frontier. The root is
/// given by vertex label or coordinates, default the first vertex / origin.
GraphCase make_case(std::string_view spec, const std::optional<std::string>& root, int radius, bool closed = true);

struct CheckResult {
  std::string name;
  bool asserted = true;
  bool passed = true;
  double measured = 0.0;
  double tolerance = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Three-route equality at p (default 1/m) for n = 0..n_max: exact in
/// rational arithmetic, 1e-12 in floating point.
SuiteReport verify_theorem1(std::span<const GraphCase> cases, std::span<const int> ms, int n_max,
                            const std::optional<Rational>& p = std::nullopt);

/// Exhaustive intertwining check for every animal of size <= max_size at the
/// root, window A union dA.
SuiteReport verify_intertwine(std::span<const GraphCase> cases, int m, int max_size);

/// Every pair of distinct overlapping connected sets of size <= max_size
/// (over all roots) annihilates on the joint window, to 1e-14.
SuiteReport verify_lemma_orthogonality(std::span<const GraphCase> cases, int m, int max_size);

/// Partition-of-unity mass at the root; report-only.
SuiteReport verify_completeness(std::span<const GraphCase> cases, int m, int max_size);

/// Eigen-residuals, cross-animal Gram matrix, and the rank and norm laws of
/// the projections, for animals of size <= max_size at the root.
SuiteReport verify_eigenbasis(std::span<const GraphCase> cases, int m, int max_size);

}  // namespace lamplighter
