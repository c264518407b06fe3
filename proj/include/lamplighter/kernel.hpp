#pragma once

#include <span>
#include <vector>

#include "lamplighter/graph.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

struct Transition {
  VertexId to;
  double prob;
  double conductance;
};

/// Reversible nearest-neighbour kernel p(x,y) = c(x,y)/c(x).
///
/// On a ball cut from a larger graph, frontier rows are substochastic: c(x)
/// still counts the edges leaving the ball.
class WalkKernel {
 public:
  explicit WalkKernel(const Graph& g);

  std::size_t size() const { return rows_.size(); }
  std::span<const Transition> row(VertexId x) const { return rows_.at(x); }
  double prob(VertexId x, VertexId y) const;
  Rational exact_prob(VertexId x, VertexId y) const;
  double weight(VertexId x) const { return weight_.at(x); }
  bool frontier(VertexId x) const { return frontier_.at(x); }

 private:
  std::vector<std::vector<Transition>> rows_;
  std::vector<double> weight_;
  std::vector<bool> frontier_;
};

/// Throws std::invalid_argument on an isolated vertex.
WalkKernel kernel(const Graph& g);

/// p restricted to an ordered finite vertex list A (absorbing outside A).
template <class T>
struct FiniteKernel {
  std::vector<VertexId> vertices;
  Matrix<T> p;
  std::vector<double> weights;

  std::size_t size() const { return vertices.size(); }
  std::size_t index_of(VertexId v) const;
};

FiniteKernel<double> truncate_kernel(const WalkKernel& k, std::span<const VertexId> vertices);
FiniteKernel<Rational> truncate_kernel_exact(const WalkKernel& k, std::span<const VertexId> vertices);

/// S(y,z) = sqrt(c(y)/c(z)) p(y,z): symmetric, same spectrum and same
/// diagonal powers as the truncated kernel.
Matrix<double> symmetrize(const FiniteKernel<double>& fk);

/// Diagonal entries (M^n)(i,i) for n = 0..n_max by repeated matrix-vector
/// products.
template <class T>
std::vector<T> diagonal_powers(const Matrix<T>& m, std::size_t i, int n_max) {
  const std::size_t d = m.rows();
  std::vector<T> out;
  out.reserve(n_max + 1);
  std::vector<T> w(d, T(0)), next(d, T(0));
  w[i] = T(1);
  out.push_back(T(1));
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t r = 0; r < d; ++r) {
      T acc(0);
      for (std::size_t c = 0; c < d; ++c) {
        if (!is_zero(m(r, c)) && !is_zero(w[c])) acc += m(r, c) * w[c];
      }
      next[r] = acc;
    }
    std::swap(w, next);
    out.push_back(w[i]);
  }
  return out;
}

}  // namespace lamplighter
