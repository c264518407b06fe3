#pragma once

#include <vector>

#include "lamplighter/animals.hpp"
#include "lamplighter/graph.hpp"
#include "lamplighter/kernel.hpp"
#include "lamplighter/numeric.hpp"

namespace lamplighter {

struct Atom {
  double location;
  double mass;
};

/// Point masses sorted by location plus a bound on mass not accounted for.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  double residual = 0.0;

  double total_mass() const;
};

struct EigenSystem {
  std::vector<double> eigenvalues;  // ascending
  Matrix<double> eigenvectors;      // column j belongs to eigenvalues[j]
};

/// Full eigendecomposition of a symmetric matrix. Each eigenvector is signed
/// so that its largest-magnitude component (first one on ties) is positive.
/// Throws std::invalid_argument if |S - S^T| exceeds `tol` anywhere.
EigenSystem eig_symmetric(const Matrix<double>& s, double tol = 1e-12);

/// Local spectral measure at `root` of the symmetrized truncated kernel:
/// atoms (lambda_j, v_j(root)^2).
AtomicMeasure local_spectral_measure(const FiniteKernel<double>& fk, VertexId root);

inline constexpr double default_merge_tolerance = 1e-9;

/// (1-p) delta_0 + sum_A P[C = A] mu_A over animals of size <= max_size;
/// residual is the unenumerated animal mass.
AtomicMeasure mixture_measure(const Graph& g, VertexId root, double p, int max_size,
                              double merge_tol = default_merge_tolerance);
AtomicMeasure mixture_measure(const Graph& g, VertexId root, double p, std::span<const Animal> animals,
                              double residual, double merge_tol = default_merge_tolerance);

/// Power sums sum mass * location^n for n = 0..n_max.
std::vector<double> moments(const AtomicMeasure& mu, int n_max);

/// Combines runs of atoms whose consecutive gaps are below `location_tol`
/// into one atom at the mass-weighted mean location. tol = 0 leaves the
/// atoms as they are.
AtomicMeasure merge_atoms(const AtomicMeasure& mu, double location_tol);

/// Cumulative mass at each atom location.
std::vector<Atom> cumulative(const AtomicMeasure& mu);

}  // namespace lamplighter
