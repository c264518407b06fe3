#pragma once

#include <cstddef>
#include <vector>

#include "lamplighter/animals.hpp"
#include "lamplighter/graph.hpp"
#include "lamplighter/kernel.hpp"
#include "lamplighter/lamp_vector.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

/// Switch-walk-switch lamplighter operator with m lamp states per vertex.
class LamplighterOperator {
 public:
  LamplighterOperator(WalkKernel kernel, int m);

  int lamps() const { return m_; }
  const WalkKernel& kernel() const { return kernel_; }
  /// Walker weights 1/c(x) of the inner product in which the operator is
  /// self-adjoint.
  const std::vector<double>& reversible_weights() const { return inv_weight_; }

 private:
  WalkKernel kernel_;
  int m_;
  std::vector<double> inv_weight_;
};

/// Exact application of the lamplighter operator: each entry (eta, x, a)
/// sends a p(x,y)/m^2 to every (eta', y) with y ~ x and eta' equal to eta off
/// {x, y}. Throws GraphError when the support reaches a truncated frontier.
LampVector apply(const LamplighterOperator& op, const LampVector& v);

inline constexpr std::size_t default_state_budget = std::size_t{1} << 24;
inline constexpr std::size_t default_path_budget = std::size_t{2'000'000'000};

/// <T~^n e_(iota,root), e_(iota,root)> for n = 0..n_max from the lamplighter
/// chain on (configurations over the ball of radius n_max/2) x (ball). Each
/// step is realized as switch, move, switch.
template <class T>
std::vector<T> return_prob_config_space(const Graph& g, VertexId root, int m, int n_max,
                                        std::size_t state_budget = default_state_budget);

/// Sum over closed paths from the root of prod p(x_i, x_{i+1}) times
/// m^-(number of distinct visited vertices); n = 0 gives 1.
/// Paths are split over the first step and run with OpenMP.
template <class T>
std::vector<T> return_prob_path_sum(const Graph& g, VertexId root, int m, int n_max,
                                    std::size_t path_budget = default_path_budget);

template <class T>
struct AnimalSum {
  std::vector<T> values;     // n = 0..n_max
  double error_bound = 0.0;  // residual animal mass
  std::size_t animals = 0;
};

/// E[(T_C^n)(root, root)] as (1-p)[n=0] + sum_A P[C = A] (T_A^n)(root, root)
/// over enumerated animals. Float mode uses the symmetrized truncation,
/// rational mode the exact one.
template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max, int max_size);

template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max,
                                        std::span<const Animal> animals, double residual);

namespace reference {
template <class T>
std::vector<T> return_prob_path_sum(const Graph& g, VertexId root, int m, int n_max,
                                    std::size_t path_budget = default_path_budget);
template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max,
                                        std::span<const Animal> animals, double residual);
}  // namespace reference

}  // namespace lamplighter
