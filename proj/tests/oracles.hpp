#pragma once

// Brute-force reference computations used only by the tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lamplighter/graph.hpp"
#include "lamplighter/kernel.hpp"

namespace oracle {

using lamplighter::Graph;
using lamplighter::VertexId;
using lamplighter::WalkKernel;

/// Connectivity of a vertex bitmask by flood fill.
inline bool connected(const Graph& g, std::uint64_t mask) {
  if (mask == 0) return false;
  VertexId start = 0;
  while (!((mask >> start) & 1U)) ++start;
  std::uint64_t seen = std::uint64_t{1} << start;
  std::vector<VertexId> stack{start};
  while (!stack.empty()) {
    VertexId x = stack.back();
    stack.pop_back();
    for (const auto& e : g.neighbours(x)) {
      std::uint64_t bit = std::uint64_t{1} << e.to;
      if ((mask & bit) && !(seen & bit)) {
        seen |= bit;
        stack.push_back(e.to);
      }
    }
  }
  return seen == mask;
}

inline std::vector<VertexId> members(std::uint64_t mask) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < 64; ++v) {
    if ((mask >> v) & 1U) out.push_back(v);
  }
  return out;
}

/// All connected subsets containing the root, with at most max_size vertices.
inline std::vector<std::vector<VertexId>> subset_animals(const Graph& g, VertexId root, std::size_t max_size) {
  std::vector<std::vector<VertexId>> out;
  const std::uint64_t total = std::uint64_t{1} << g.size();
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    if (!((mask >> root) & 1U)) continue;
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > max_size) continue;
    if (connected(g, mask)) out.push_back(members(mask));
  }
  return out;
}

/// (T_A^n)(x, x) summed over every path x = x_0, ..., x_n = x inside A.
inline double closed_path_sum(const WalkKernel& k, const std::vector<bool>& inside, VertexId x, int n) {
  std::function<double(VertexId, int)> walk = [&](VertexId at, int left) -> double {
    if (left == 0) return at == x ? 1.0 : 0.0;
    double s = 0.0;
    for (const auto& t : k.row(at)) {
      if (inside[t.to]) s += t.prob * walk(t.to, left - 1);
    }
    return s;
  };
  return inside[x] ? walk(x, n) : 0.0;
}

/// E[(T_C^n)(root, root)] by enumerating every open/closed site state of a
/// graph with at most ~20 vertices. A closed root gives 1 at n = 0, else 0.
inline std::vector<double> exhaustive_expected_return(const Graph& g, VertexId root, double p, int n_max) {
  const WalkKernel k(g);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  const std::uint64_t total = std::uint64_t{1} << g.size();
  for (std::uint64_t open = 0; open < total; ++open) {
    double weight = 1.0;
    for (VertexId v = 0; v < g.size(); ++v) weight *= ((open >> v) & 1U) ? p : 1.0 - p;
    if (!((open >> root) & 1U)) {
      out[0] += weight;
      continue;
    }
    // cluster of the root among open sites
    std::vector<bool> in(g.size(), false);
    std::vector<VertexId> stack{root};
    in[root] = true;
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      for (const auto& e : g.neighbours(x)) {
        if (((open >> e.to) & 1U) && !in[e.to]) {
          in[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    std::vector<double> w(g.size(), 0.0), next(g.size());
    w[root] = 1.0;
    out[0] += weight;
    for (int n = 1; n <= n_max; ++n) {
      std::fill(next.begin(), next.end(), 0.0);
      for (VertexId x = 0; x < g.size(); ++x) {
        if (w[x] == 0.0) continue;
        for (const auto& t : k.row(x)) {
          if (in[t.to]) next[t.to] += w[x] * t.prob;
        }
      }
      std::swap(w, next);
      out[static_cast<std::size_t>(n)] += weight * w[root];
    }
  }
  return out;
}

}  // namespace oracle
