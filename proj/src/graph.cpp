#include "lamplighter/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lamplighter {

namespace {

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw GraphError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

bool FamilySpec::infinite() const {
  return kind == Family::line || kind == Family::z2 || kind == Family::regular_tree;
}

std::string FamilySpec::str() const {
  switch (kind) {
    case Family::explicit_graph:
      return source.empty() ? "explicit" : "explicit:" + source;
    case Family::line:
      return "line";
    case Family::cycle:
      return "cycle:" + std::to_string(a);
    case Family::grid:
      return "grid:" + std::to_string(a) + "x" + std::to_string(b);
    case Family::z2:
      return "z2";
    case Family::regular_tree:
      return "tree:" + std::to_string(a);
  }
  return "?";
}

std::vector<Coords> family_neighbours(const FamilySpec& family, const Coords& at) {
  std::vector<Coords> out;
  switch (family.kind) {
    case Family::line:
      out = {{at[0] - 1}, {at[0] + 1}};
      break;
    case Family::z2:
      out = {{at[0] - 1, at[1]}, {at[0] + 1, at[1]}, {at[0], at[1] - 1}, {at[0], at[1] + 1}};
      break;
    case Family::regular_tree: {
      // a word over child indices; the root has `a` children, others a-1
      if (!at.empty()) out.emplace_back(at.begin(), at.end() - 1);
      int children = at.empty() ? family.a : family.a - 1;
      for (int c = 0; c < children; ++c) {
        Coords child = at;
        child.push_back(c);
        out.push_back(std::move(child));
      }
      break;
    }
    default:
      throw GraphError("family " + family.str() + " has no implicit neighbourhood");
  }
  return out;
}

Coords family_origin(const FamilySpec& family) {
  switch (family.kind) {
    case Family::line:
      return {0};
    case Family::z2:
      return {0, 0};
    case Family::regular_tree:
      return {};
    case Family::grid:
      return {0, 0};
    default:
      return {0};
  }
}

std::string format_coords(const FamilySpec& family, const Coords& at) {
  if (family.kind == Family::regular_tree) {
    std::string s = "r";
    for (int c : at) s += "." + std::to_string(c);
    return s;
  }
  std::string s;
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(at[i]);
  }
  return s;
}

Coords parse_coords(const FamilySpec& family, std::string_view label) {
  Coords out;
  std::string_view rest = label;
  if (family.kind == Family::regular_tree) {
    if (rest.empty() || rest.front() != 'r') throw GraphError("tree vertex labels look like r.0.1");
    rest.remove_prefix(1);
    while (!rest.empty()) {
      if (rest.front() != '.') throw GraphError("tree vertex labels look like r.0.1");
      rest.remove_prefix(1);
      auto dot = rest.find('.');
      out.push_back(parse_int(rest.substr(0, dot), "child index"));
      rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot);
    }
    return out;
  }
  while (true) {
    auto comma = rest.find(',');
    out.push_back(parse_int(rest.substr(0, comma), "coordinate"));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

Graph Graph::from_edges(std::vector<std::string> names,
                        const std::vector<std::tuple<VertexId, VertexId, double>>& edges,
                        FamilySpec family) {
  Graph g;
  g.family_ = std::move(family);
  g.vertices_.resize(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    g.vertices_[i].name = std::move(names[i]);
    g.vertices_[i].coords = {static_cast<int>(i)};
  }
  const auto n = static_cast<VertexId>(g.vertices_.size());
  for (auto [x, y, c] : edges) {
    if (x >= n || y >= n) throw GraphError("edge endpoint out of range");
    if (x == y) throw GraphError("self-loop at vertex " + g.vertices_[x].name);
    if (!(c > 0.0)) throw GraphError("nonpositive conductance on edge " + g.vertices_[x].name + "-" + g.vertices_[y].name);
    auto lookup = [&](VertexId a, VertexId b) {
      const auto& es = g.vertices_[a].edges;
      auto it = std::find_if(es.begin(), es.end(), [b](const Edge& e) { return e.to == b; });
      return it == es.end() ? 0.0 : it->conductance;
    };
    double existing = lookup(x, y);
    double reverse = lookup(y, x);
    if (existing != reverse) throw GraphError("asymmetric adjacency");
    if (existing > 0.0) {
      if (existing != c) throw GraphError("asymmetric conductance on edge " + g.vertices_[x].name + "-" + g.vertices_[y].name);
      continue;
    }
    g.vertices_[x].edges.push_back({y, c});
    g.vertices_[y].edges.push_back({x, c});
  }
  for (auto& v : g.vertices_) {
    std::sort(v.edges.begin(), v.edges.end(), [](const Edge& l, const Edge& r) { return l.to < r.to; });
    for (const Edge& e : v.edges) v.weight += e.conductance;
  }
  g.index();
  return g;
}

Graph Graph::lazy(FamilySpec family) {
  Graph g;
  g.family_ = std::move(family);
  g.lazy_ = true;
  return g;
}

void Graph::index() {
  by_name_.clear();
  by_coords_.clear();
  for (VertexId v = 0; v < vertices_.size(); ++v) {
    by_name_.emplace(vertices_[v].name, v);
    by_coords_.emplace(vertices_[v].coords, v);
  }
}

double Graph::conductance(VertexId x, VertexId y) const {
  const auto& edges = vertices_.at(x).edges;
  auto it = std::lower_bound(edges.begin(), edges.end(), y, [](const Edge& e, VertexId id) { return e.to < id; });
  return (it != edges.end() && it->to == y) ? it->conductance : 0.0;
}

bool Graph::has_frontier() const {
  return std::any_of(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return v.frontier; });
}

std::optional<VertexId> Graph::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<VertexId> Graph::find(const Coords& coords) const {
  auto it = by_coords_.find(coords);
  if (it == by_coords_.end()) return std::nullopt;
  return it->second;
}

Graph graph_from_json_text(std::string_view text, FamilySpec family) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError(std::string("malformed adjacency JSON: ") + e.what());
  }
  if (!doc.contains("vertices") || !doc.contains("edges")) {
    throw GraphError("adjacency JSON needs \"vertices\" and \"edges\"");
  }
  std::vector<std::string> names;
  for (const auto& label : doc["vertices"]) {
    names.push_back(label.is_string() ? label.get<std::string>() : label.dump());
  }
  std::vector<std::tuple<VertexId, VertexId, double>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw GraphError("edge must be [i,j] or [i,j,conductance]");
    double c = e.size() == 3 ? e[2].get<double>() : 1.0;
    long i = e[0].get<long>();
    long j = e[1].get<long>();
    if (i < 0 || j < 0) throw GraphError("negative vertex index in edge list");
    edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j), c);
  }
  return Graph::from_edges(std::move(names), edges, std::move(family));
}

Graph build_graph(std::string_view spec) {
  auto colon = spec.find(':');
  std::string_view head = spec.substr(0, colon);
  std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  FamilySpec family;
  if (head == "explicit") {
    family.kind = Family::explicit_graph;
    family.source = std::string(arg);
    std::ifstream in{std::string(arg)};
    if (!in) throw GraphError("cannot open adjacency file '" + std::string(arg) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return graph_from_json_text(buf.str(), family);
  }
  if (head == "line" || head == "z2") {
    if (!arg.empty()) throw GraphError("family " + std::string(head) + " takes no parameters");
    family.kind = head == "line" ? Family::line : Family::z2;
    return Graph::lazy(family);
  }
  if (head == "tree") {
    family.kind = Family::regular_tree;
    family.a = parse_int(arg, "tree degree");
    if (family.a < 2) throw GraphError("tree degree must be at least 2");
    return Graph::lazy(family);
  }
  if (head == "cycle") {
    family.kind = Family::cycle;
    family.a = parse_int(arg, "cycle length");
    if (family.a < 3) throw GraphError("cycle length must be at least 3");
    std::vector<std::string> names;
    std::vector<std::tuple<VertexId, VertexId, double>> edges;
    for (int i = 0; i < family.a; ++i) {
      names.push_back(std::to_string(i));
      edges.emplace_back(i, (i + 1) % family.a, 1.0);
    }
    return Graph::from_edges(std::move(names), edges, family);
  }
  if (head == "grid") {
    family.kind = Family::grid;
    auto x = arg.find('x');
    if (x == std::string_view::npos) throw GraphError("grid spec must be grid:<w>x<h>");
    family.a = parse_int(arg.substr(0, x), "grid width");
    family.b = parse_int(arg.substr(x + 1), "grid height");
    if (family.a < 1 || family.b < 1 || family.a * family.b < 2) throw GraphError("grid needs at least two vertices");
    std::vector<std::string> names;
    std::vector<std::tuple<VertexId, VertexId, double>> edges;
    const int w = family.a;
    for (int y = 0; y < family.b; ++y) {
      for (int xi = 0; xi < w; ++xi) {
        names.push_back(std::to_string(xi) + "," + std::to_string(y));
        auto id = static_cast<VertexId>(y * w + xi);
        if (xi + 1 < w) edges.emplace_back(id, id + 1, 1.0);
        if (y + 1 < family.b) edges.emplace_back(id, id + w, 1.0);
      }
    }
    Graph g = Graph::from_edges(std::move(names), edges, family);
    return g;
  }
  throw GraphError("unknown graph family '" + std::string(head) + "'");
}

Graph materialize(const Graph& g, const Coords& root, int radius) {
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  Graph out;
  out.family_ = g.family_;

  if (!g.is_lazy()) {
    auto r = g.find(root);
    if (!r) throw GraphError("root not in graph");
    auto order = ball(g, *r, radius);
    std::vector<long> new_id(g.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<long>(i);
    out.vertices_.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& src = g.vertices_[order[i]];
      auto& dst = out.vertices_[i];
      dst.coords = src.coords;
      dst.name = src.name;
      dst.weight = src.weight;
      dst.frontier = src.frontier;
      for (const Edge& e : src.edges) {
        if (new_id[e.to] < 0) {
          dst.frontier = true;
        } else {
          dst.edges.push_back({static_cast<VertexId>(new_id[e.to]), e.conductance});
        }
      }
      std::sort(dst.edges.begin(), dst.edges.end(), [](const Edge& l, const Edge& r) { return l.to < r.to; });
    }
    out.index();
    return out;
  }

  // breadth-first over the implicit family
  std::map<Coords, VertexId> ids;
  std::vector<Coords> order{root};
  std::vector<int> dist{0};
  ids.emplace(root, 0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    if (dist[head] == radius) continue;
    for (Coords& nb : family_neighbours(g.family_, order[head])) {
      if (ids.count(nb)) continue;
      ids.emplace(nb, static_cast<VertexId>(order.size()));
      order.push_back(std::move(nb));
      dist.push_back(dist[head] + 1);
    }
  }
  out.vertices_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& dst = out.vertices_[i];
    dst.coords = order[i];
    dst.name = format_coords(g.family_, order[i]);
    for (const Coords& nb : family_neighbours(g.family_, order[i])) {
      dst.weight += 1.0;
      auto it = ids.find(nb);
      if (it == ids.end()) {
        dst.frontier = true;
      } else {
        dst.edges.push_back({it->second, 1.0});
      }
    }
    std::sort(dst.edges.begin(), dst.edges.end(), [](const Edge& l, const Edge& r) { return l.to < r.to; });
  }
  out.index();
  return out;
}

Graph closed_ball(const Graph& g, VertexId root, int radius) {
  Graph out = materialize(g, g.coords(root), radius);
  out.family_ = FamilySpec{Family::explicit_graph, 0, 0, g.family_.str() + "/ball" + std::to_string(radius)};
  for (auto& v : out.vertices_) {
    v.frontier = false;
    v.weight = 0.0;
    for (const Edge& e : v.edges) v.weight += e.conductance;
  }
  return out;
}

std::vector<VertexId> ball(const Graph& g, VertexId root, int radius) {
  if (g.is_lazy()) throw GraphError("ball() needs a materialized graph; call materialize() first");
  if (root >= g.size()) throw GraphError("root not in graph");
  std::vector<int> dist(g.size(), -1);
  std::vector<VertexId> order{root};
  dist[root] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    VertexId v = order[head];
    if (dist[v] == radius) continue;
    for (const Edge& e : g.neighbours(v)) {
      if (dist[e.to] >= 0) continue;
      dist[e.to] = dist[v] + 1;
      order.push_back(e.to);
    }
  }
  return order;
}

std::vector<int> distances(const Graph& g, VertexId root) {
  std::vector<int> dist(g.size(), -1);
  std::deque<VertexId> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    VertexId v = queue.front();
    queue.pop_front();
    for (const Edge& e : g.neighbours(v)) {
      if (dist[e.to] < 0) {
        dist[e.to] = dist[v] + 1;
        queue.push_back(e.to);
      }
    }
  }
  return dist;
}

}  // namespace lamplighter
