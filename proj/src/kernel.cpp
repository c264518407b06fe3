#include "lamplighter/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace lamplighter {

WalkKernel::WalkKernel(const Graph& g) {
  if (g.is_lazy()) throw GraphError("kernel needs a materialized graph");
  rows_.resize(g.size());
  weight_.resize(g.size());
  frontier_.resize(g.size());
  for (VertexId x = 0; x < g.size(); ++x) {
    double c = g.weight(x);
    if (!(c > 0.0) || (g.degree(x) == 0 && !g.frontier(x))) {
      throw std::invalid_argument("isolated vertex " + g.name(x) + " has no walk kernel");
    }
    weight_[x] = c;
    frontier_[x] = g.frontier(x);
    for (const Edge& e : g.neighbours(x)) rows_[x].push_back({e.to, e.conductance / c, e.conductance});
  }
}

double WalkKernel::prob(VertexId x, VertexId y) const {
  const auto& r = rows_.at(x);
  auto it = std::lower_bound(r.begin(), r.end(), y, [](const Transition& t, VertexId id) { return t.to < id; });
  return (it != r.end() && it->to == y) ? it->prob : 0.0;
}

Rational WalkKernel::exact_prob(VertexId x, VertexId y) const {
  const auto& r = rows_.at(x);
  auto it = std::lower_bound(r.begin(), r.end(), y, [](const Transition& t, VertexId id) { return t.to < id; });
  if (it == r.end() || it->to != y) return Rational(0);
  Rational q = exact_rational(it->conductance) / exact_rational(weight_.at(x));
  q.canonicalize();
  return q;
}

WalkKernel kernel(const Graph& g) { return WalkKernel(g); }

template <class T>
std::size_t FiniteKernel<T>::index_of(VertexId v) const {
  auto it = std::find(vertices.begin(), vertices.end(), v);
  if (it == vertices.end()) throw std::invalid_argument("vertex not in truncation set");
  return static_cast<std::size_t>(it - vertices.begin());
}

template struct FiniteKernel<double>;
template struct FiniteKernel<Rational>;

namespace {

template <class T, class Prob>
FiniteKernel<T> truncate_with(const WalkKernel& k, std::span<const VertexId> vertices, Prob prob) {
  if (vertices.empty()) throw std::invalid_argument("truncation set must be nonempty");
  FiniteKernel<T> fk;
  fk.vertices.assign(vertices.begin(), vertices.end());
  fk.p = Matrix<T>(vertices.size(), vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] >= k.size()) throw std::invalid_argument("truncation set contains an unknown vertex");
    fk.weights.push_back(k.weight(vertices[i]));
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = 0; j < vertices.size(); ++j) {
      if (i != j) fk.p(i, j) = prob(vertices[i], vertices[j]);
    }
  }
  return fk;
}

}  // namespace

FiniteKernel<double> truncate_kernel(const WalkKernel& k, std::span<const VertexId> vertices) {
  return truncate_with<double>(k, vertices, [&](VertexId x, VertexId y) { return k.prob(x, y); });
}

FiniteKernel<Rational> truncate_kernel_exact(const WalkKernel& k, std::span<const VertexId> vertices) {
  return truncate_with<Rational>(k, vertices, [&](VertexId x, VertexId y) { return k.exact_prob(x, y); });
}

Matrix<double> symmetrize(const FiniteKernel<double>& fk) {
  const std::size_t d = fk.size();
  Matrix<double> s(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (fk.p(i, j) != 0.0) s(i, j) = std::sqrt(fk.weights[i] / fk.weights[j]) * fk.p(i, j);
    }
  }
  // round-off in the two square roots can differ by an ulp; average it out
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double m = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = m;
      s(j, i) = m;
    }
  }
  return s;
}

}  // namespace lamplighter
