#include "lamplighter/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace lamplighter {

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms) s += a.mass;
  return s;
}

EigenSystem eig_symmetric(const Matrix<double>& s, double tol) {
  const auto n = static_cast<Eigen::Index>(s.rows());
  if (s.rows() != s.cols()) throw std::invalid_argument("eig_symmetric needs a square matrix");
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = s(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > tol) throw std::invalid_argument("matrix is not symmetric within tolerance");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");

  EigenSystem out;
  out.eigenvectors = Matrix<double>(s.rows(), s.rows());
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues.push_back(solver.eigenvalues()(j));
    Eigen::VectorXd v = solver.eigenvectors().col(j);
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(v(i)) > std::abs(v(pivot)) + 1e-12) pivot = i;
    }
    if (v(pivot) < 0) v = -v;
    for (Eigen::Index i = 0; i < n; ++i) out.eigenvectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v(i);
  }
  return out;
}

AtomicMeasure local_spectral_measure(const FiniteKernel<double>& fk, VertexId root) {
  const std::size_t r = fk.index_of(root);
  auto sys = eig_symmetric(symmetrize(fk));
  AtomicMeasure mu;
  for (std::size_t j = 0; j < sys.eigenvalues.size(); ++j) {
    double c = sys.eigenvectors(r, j);
    mu.atoms.push_back({sys.eigenvalues[j], c * c});
  }
  return mu;
}

AtomicMeasure merge_atoms(const AtomicMeasure& mu, double location_tol) {
  AtomicMeasure sorted = mu;
  std::stable_sort(sorted.atoms.begin(), sorted.atoms.end(),
                   [](const Atom& l, const Atom& r) { return l.location < r.location; });
  if (location_tol <= 0.0 || sorted.atoms.empty()) return sorted;

  AtomicMeasure out;
  out.residual = mu.residual;
  std::size_t i = 0;
  while (i < sorted.atoms.size()) {
    std::size_t j = i + 1;
    while (j < sorted.atoms.size() && sorted.atoms[j].location - sorted.atoms[j - 1].location < location_tol) ++j;
    double mass = 0.0;
    double moment = 0.0;
    double plain = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      mass += sorted.atoms[k].mass;
      moment += sorted.atoms[k].mass * sorted.atoms[k].location;
      plain += sorted.atoms[k].location;
    }
    double loc = mass > 0.0 ? moment / mass : plain / static_cast<double>(j - i);
    out.atoms.push_back({loc, mass});
    i = j;
  }
  return out;
}

AtomicMeasure mixture_measure(const Graph& g, VertexId root, double p, std::span<const Animal> animals,
                              double residual, double merge_tol) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("percolation parameter must lie in (0,1)");
  const WalkKernel k(g);
  std::vector<AtomicMeasure> parts(animals.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(animals.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const Animal& a = animals[static_cast<std::size_t>(i)];
      parts[static_cast<std::size_t>(i)] = local_spectral_measure(truncate_kernel(k, a.vertices), root);
      double w = animal_probability(a, p);
      for (Atom& atom : parts[static_cast<std::size_t>(i)].atoms) atom.mass *= w;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  AtomicMeasure mix;
  mix.atoms.push_back({0.0, 1.0 - p});
  for (const auto& part : parts) mix.atoms.insert(mix.atoms.end(), part.atoms.begin(), part.atoms.end());
  mix.residual = residual;
  auto merged = merge_atoms(mix, merge_tol);
  merged.residual = residual;
  return merged;
}

AtomicMeasure mixture_measure(const Graph& g, VertexId root, double p, int max_size, double merge_tol) {
  auto animals = enumerate_animals(g, root, max_size);
  double residual = residual_mass(g, root, p, animals, max_size).residual;
  return mixture_measure(g, root, p, animals, residual, merge_tol);
}

std::vector<double> moments(const AtomicMeasure& mu, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const Atom& a : mu.atoms) {
    double power = 1.0;
    for (auto& m : out) {
      m += a.mass * power;
      power *= a.location;
    }
  }
  return out;
}

std::vector<Atom> cumulative(const AtomicMeasure& mu) {
  std::vector<Atom> out;
  double acc = 0.0;
  for (const Atom& a : mu.atoms) {
    acc += a.mass;
    out.push_back({a.location, acc});
  }
  return out;
}

}  // namespace lamplighter
