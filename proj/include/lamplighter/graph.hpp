#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace lamplighter {

using VertexId = std::uint32_t;
using Coords = std::vector<int>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Family { explicit_graph, line, cycle, grid, z2, regular_tree };

struct FamilySpec {
  Family kind = Family::explicit_graph;
  int a = 0;  // cycle length, grid width, tree degree
  int b = 0;  // grid height
  std::string source;

  bool infinite() const;
  std::string str() const;
};

/// Neighbours of a lattice/tree vertex, with unit conductances.
std::vector<Coords> family_neighbours(const FamilySpec& family, const Coords& at);
Coords family_origin(const FamilySpec& family);
std::string format_coords(const FamilySpec& family, const Coords& at);
/// Inverse of format_coords; throws GraphError on malformed labels.
Coords parse_coords(const FamilySpec& family, std::string_view label);

struct Edge {
  VertexId to;
  double conductance;
};

/// Undirected graph with symmetric positive conductances.
///
/// A graph is either fully materialized (finite families, explicit graphs,
/// and balls cut out of infinite families) or lazy (an infinite family with
/// no vertex table, see `materialize`). In a ball cut from a larger graph the
/// vertices on the outer sphere may miss neighbours; they are flagged as
/// frontier vertices and keep their host weight c(x).
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(std::vector<std::string> names,
                          const std::vector<std::tuple<VertexId, VertexId, double>>& edges,
                          FamilySpec family = {});
  static Graph lazy(FamilySpec family);

  bool is_lazy() const { return lazy_; }
  std::size_t size() const { return vertices_.size(); }

  std::span<const Edge> neighbours(VertexId v) const { return vertices_.at(v).edges; }
  std::size_t degree(VertexId v) const { return vertices_.at(v).edges.size(); }
  double conductance(VertexId x, VertexId y) const;
  bool adjacent(VertexId x, VertexId y) const { return conductance(x, y) > 0.0; }

  /// Total conductance c(x) in the host graph.
  double weight(VertexId v) const { return vertices_.at(v).weight; }
  bool frontier(VertexId v) const { return vertices_.at(v).frontier; }
  bool has_frontier() const;

  const Coords& coords(VertexId v) const { return vertices_.at(v).coords; }
  const std::string& name(VertexId v) const { return vertices_.at(v).name; }
  std::optional<VertexId> find(std::string_view name) const;
  std::optional<VertexId> find(const Coords& coords) const;

  const FamilySpec& family() const { return family_; }

 private:
  struct Vertex {
    Coords coords;
    std::string name;
    std::vector<Edge> edges;  // sorted by target id
    double weight = 0.0;
    bool frontier = false;
  };

  friend Graph materialize(const Graph&, const Coords&, int);
  friend Graph closed_ball(const Graph&, VertexId, int);

  void index();

  FamilySpec family_;
  bool lazy_ = false;
  std::vector<Vertex> vertices_;
  std::map<std::string, VertexId, std::less<>> by_name_;
  std::map<Coords, VertexId> by_coords_;
};

/// Parses `explicit:<json>`, `line`, `cycle:<n>`, `grid:<w>x<h>`, `z2`, `tree:<d>`.
Graph build_graph(std::string_view spec);
Graph graph_from_json_text(std::string_view text, FamilySpec family = {});

/// Ball of the given radius around `root`, as its own graph. Ids are assigned
/// in breadth-first order (root = 0); host weights are kept.
Graph materialize(const Graph& g, const Coords& root, int radius);

/// Induced subgraph on a ball, treated as a finite graph in its own right:
/// weights are recomputed from the induced edges and nothing is frontier.
Graph closed_ball(const Graph& g, VertexId root, int radius);

/// Vertices within `radius` of `root`, breadth-first, neighbours in id order.
std::vector<VertexId> ball(const Graph& g, VertexId root, int radius);

/// Graph distance from `root` to every vertex (-1 when unreachable).
std::vector<int> distances(const Graph& g, VertexId root);

}  // namespace lamplighter
