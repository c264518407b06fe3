#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "lamplighter/animals.hpp"
#include "lamplighter/kernel.hpp"
#include "lamplighter/lamp_vector.hpp"
#include "lamplighter/lamplighter.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

/// Finitely supported vector of l2(configurations), keyed in canonical order.
template <class T>
using BasicConfigVector = std::map<Configuration, T>;
using ConfigVector = BasicConfigVector<Amplitude>;
using RationalConfigVector = BasicConfigVector<Rational>;

/// Theta_{A,dA}: averaging on A, complement of averaging on dA.
struct ProjectionSpec {
  std::vector<VertexId> average_sites;     // A, sorted
  std::vector<VertexId> complement_sites;  // dA, sorted
  int m = 2;

  static ProjectionSpec of(const Animal& a, int m);
  std::vector<VertexId> sites() const;  // A union dA, sorted
};

template <class T>
BasicConfigVector<T> basis_config(Configuration eta) {
  BasicConfigVector<T> v;
  v.emplace(std::move(eta), T(1));
  return v;
}

/// Theta_x: replaces the lamp at `site` by the uniform average over m states.
template <class T>
BasicConfigVector<T> theta_site(const BasicConfigVector<T>& v, VertexId site, int m) {
  BasicConfigVector<T> out;
  const T share = T(1) / T(m);
  for (const auto& [eta, amp] : v) {
    T part = amp * share;
    for (int s = 0; s < m; ++s) out[eta.with(site, static_cast<Lamp>(s))] += part;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == T(0); });
  return out;
}

/// (I - Theta_x) v.
template <class T>
BasicConfigVector<T> complement_site(const BasicConfigVector<T>& v, VertexId site, int m) {
  BasicConfigVector<T> out = v;
  for (const auto& [eta, amp] : theta_site(v, site, m)) out[eta] -= amp;
  std::erase_if(out, [](const auto& kv) { return kv.second == T(0); });
  return out;
}

template <class T>
BasicConfigVector<T> theta_animal(BasicConfigVector<T> v, const ProjectionSpec& spec) {
  for (VertexId x : spec.average_sites) v = theta_site(v, x, spec.m);
  for (VertexId y : spec.complement_sites) v = complement_site(v, y, spec.m);
  return v;
}

template <class T>
T squared_norm(const BasicConfigVector<T>& v);
template <>
inline Rational squared_norm(const RationalConfigVector& v) {
  Rational s(0);
  for (const auto& [eta, amp] : v) s += amp * amp;
  return s;
}
template <>
inline Amplitude squared_norm(const ConfigVector& v) {
  double s = 0.0;
  for (const auto& [eta, amp] : v) s += std::norm(amp);
  return s;
}

Amplitude inner(const ConfigVector& u, const ConfigVector& v);

/// All configurations with lamps only on `window`, in canonical order.
std::vector<Configuration> window_configurations(std::span<const VertexId> window, int m);

/// Dense coordinates for lamp configurations over a small window.
class WindowSpace {
 public:
  WindowSpace(std::vector<VertexId> sites, int m, std::size_t max_dim = std::size_t{1} << 22);

  std::size_t dim() const { return dim_; }
  int lamps() const { return m_; }
  const std::vector<VertexId>& sites() const { return sites_; }
  std::size_t position(VertexId site) const;
  std::size_t index(const Configuration& eta) const;
  Configuration config(std::size_t index) const;

  void theta(std::vector<double>& v, VertexId site) const;
  void complement(std::vector<double>& v, VertexId site) const;
  void project(std::vector<double>& v, const ProjectionSpec& spec) const;

 private:
  std::vector<VertexId> sites_;
  int m_;
  std::size_t dim_ = 1;
  std::vector<std::size_t> stride_;
};

/// Orthonormal basis of the range of Theta_{A,dA} on configurations
/// supported in `window`, by Gram-Schmidt (two passes) over the images of
/// e_eta in canonical pivot order; images with norm below 1e-12 are dropped.
std::vector<ConfigVector> range_basis(const ProjectionSpec& spec, std::span<const VertexId> window);

/// Matrix of Theta_{A,dA} on the window, built column by column from e_eta.
Matrix<double> projector_matrix(const ProjectionSpec& spec, std::span<const VertexId> window);
std::size_t matrix_rank(const Matrix<double>& a, double tol = 1e-9);

struct Eigenfunction {
  double lambda = 0.0;
  LampVector vector;
};

/// phi (x) f as a lamp vector, walker positions from `walkers`.
LampVector tensor(const ConfigVector& phi, std::span<const VertexId> walkers, std::span<const double> f);

/// Eigenfunctions phi_i (x) f_a of the lamplighter operator for one animal:
/// f_a = D^{1/2} v_a with v_a the eigenvectors of the symmetrized T_A. Unit
/// norm in the reversible inner product (walker weights 1/c(x)).
std::vector<Eigenfunction> build_eigenfunctions(const Animal& animal, const WalkKernel& k, int m,
                                                std::span<const VertexId> window);

/// ||T~ phi - lambda phi|| in the reversible norm, T~ applied by `apply`.
double verify_eigen(const Eigenfunction& pair, const LamplighterOperator& op);

/// Largest |G - I| entry of the Gram matrix in the reversible inner product.
double gram_deviation(std::span<const Eigenfunction> fs, std::span<const double> walker_weight);

struct IntertwineReport {
  double max_residual = 0.0;     // |T~ (Theta (x) P_A) e - (Theta (x) T_A) e|
  double max_commutator = 0.0;   // |T~ (Theta (x) P_A) e - (Theta (x) I) T~ e| for x in A
  double max_outside = 0.0;      // |(Theta (x) P_A) T~ e| for x in dA
  std::size_t checked = 0;
};

/// Both sides of T~ (Theta_{A,dA} (x) P_A) = Theta_{A,dA} (x) T_A on basis
/// vectors e_(eta, x), eta over `window`, x in A union dA. Exhaustive when
/// there are at most `trials` of them, otherwise a seeded random subset.
IntertwineReport intertwine_check(const Animal& animal, const LamplighterOperator& op,
                                  std::span<const VertexId> window, std::size_t trials,
                                  std::uint64_t seed = 1);

/// max over eta of ||Theta_{A,dA} Theta_{B,dB} e_eta|| on the joint window.
/// Evaluated site by site through the tensor structure of both projections.
double annihilation_residual(const Animal& a, const Animal& b, int m);
/// Same quantity by projecting every basis vector of the joint window.
double annihilation_residual_dense(const Animal& a, const Animal& b, int m);

struct CompletenessReport {
  double mass = 0.0;              // sum ||Theta_{A,dA} e_iota||^2, operator route
  double closed_form = 0.0;       // sum (1/m)^|A| (1-1/m)^|dA|
  double max_deviation = 0.0;     // largest per-animal difference of the two
  double root_conditioned = 0.0;  // mass * m
  double residual = 0.0;          // unenumerated animal mass at p = 1/m
  std::size_t animals = 0;
};

/// Measures the partition-of-unity mass at the root; reports, never asserts.
CompletenessReport completeness_probe(const Graph& g, VertexId root, int m, int max_size);

}  // namespace lamplighter
