#include "lamplighter/eigenbasis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "lamplighter/percolation.hpp"
#include "lamplighter/spectral.hpp"

namespace lamplighter {

ProjectionSpec ProjectionSpec::of(const Animal& a, int m) {
  if (m < 2 || m > 255) throw std::invalid_argument("lamp count m must lie in [2, 255]");
  return {a.vertices, a.boundary, m};
}

std::vector<VertexId> ProjectionSpec::sites() const {
  std::vector<VertexId> s;
  std::set_union(average_sites.begin(), average_sites.end(), complement_sites.begin(), complement_sites.end(),
                 std::back_inserter(s));
  return s;
}

Amplitude inner(const ConfigVector& u, const ConfigVector& v) {
  Amplitude s = 0.0;
  auto i = u.begin();
  auto j = v.begin();
  while (i != u.end() && j != v.end()) {
    auto c = i->first <=> j->first;
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      s += std::conj(i->second) * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

WindowSpace::WindowSpace(std::vector<VertexId> sites, int m, std::size_t max_dim) : sites_(std::move(sites)), m_(m) {
  if (m < 2 || m > 255) throw std::invalid_argument("lamp count m must lie in [2, 255]");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    stride_.push_back(dim_);
    if (dim_ > max_dim / static_cast<std::size_t>(m)) {
      throw BudgetError("window of " + std::to_string(sites_.size()) + " sites is too large for dense storage");
    }
    dim_ *= static_cast<std::size_t>(m);
  }
}

std::size_t WindowSpace::position(VertexId site) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site) throw std::out_of_range("site outside the window");
  return static_cast<std::size_t>(it - sites_.begin());
}

std::size_t WindowSpace::index(const Configuration& eta) const {
  std::size_t idx = 0;
  for (const auto& [site, lamp] : eta.lit()) idx += stride_[position(site)] * lamp;
  return idx;
}

Configuration WindowSpace::config(std::size_t index) const {
  Configuration c;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    auto lamp = static_cast<Lamp>((index / stride_[i]) % static_cast<std::size_t>(m_));
    if (lamp != 0) c.set(sites_[i], lamp);
  }
  return c;
}

void WindowSpace::theta(std::vector<double>& v, VertexId site) const {
  const std::size_t s = stride_[position(site)];
  const std::size_t block = s * static_cast<std::size_t>(m_);
  const double inv = 1.0 / m_;
  for (std::size_t hi = 0; hi < dim_; hi += block) {
    for (std::size_t lo = 0; lo < s; ++lo) {
      const std::size_t base = hi + lo;
      double sum = 0.0;
      for (std::size_t k = 0; k < static_cast<std::size_t>(m_); ++k) sum += v[base + k * s];
      sum *= inv;
      for (std::size_t k = 0; k < static_cast<std::size_t>(m_); ++k) v[base + k * s] = sum;
    }
  }
}

void WindowSpace::complement(std::vector<double>& v, VertexId site) const {
  std::vector<double> avg = v;
  theta(avg, site);
  for (std::size_t i = 0; i < dim_; ++i) v[i] -= avg[i];
}

void WindowSpace::project(std::vector<double>& v, const ProjectionSpec& spec) const {
  for (VertexId x : spec.average_sites) theta(v, x);
  for (VertexId y : spec.complement_sites) complement(v, y);
}

std::vector<Configuration> window_configurations(std::span<const VertexId> window, int m) {
  WindowSpace ws({window.begin(), window.end()}, m);
  std::vector<Configuration> out;
  out.reserve(ws.dim());
  for (std::size_t i = 0; i < ws.dim(); ++i) out.push_back(ws.config(i));
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

namespace {

void require_inside(std::span<const VertexId> sites, std::span<const VertexId> window) {
  for (VertexId s : sites) {
    if (!std::binary_search(window.begin(), window.end(), s)) {
      throw std::invalid_argument("window must contain the animal and its boundary");
    }
  }
}

std::vector<VertexId> sorted_copy(std::span<const VertexId> w) {
  std::vector<VertexId> s(w.begin(), w.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

std::vector<ConfigVector> range_basis(const ProjectionSpec& spec, std::span<const VertexId> window) {
  const auto w = sorted_copy(window);
  require_inside(spec.sites(), w);
  WindowSpace ws(w, spec.m);

  // Theta_x e_eta does not depend on eta(x) for x in A
  std::vector<Configuration> pivots;
  for (Configuration& eta : window_configurations(w, spec.m)) {
    bool lit_on_a = false;
    for (VertexId x : spec.average_sites) lit_on_a = lit_on_a || eta.lamp(x) != 0;
    if (!lit_on_a) pivots.push_back(std::move(eta));
  }

  // rank of a projection = its trace, a product of single-site traces
  std::size_t rank = 1;
  for (std::size_t i = 0; i < spec.complement_sites.size(); ++i) rank *= static_cast<std::size_t>(spec.m - 1);
  for (std::size_t i = spec.sites().size(); i < w.size(); ++i) rank *= static_cast<std::size_t>(spec.m);

  std::vector<std::vector<double>> basis;
  for (const Configuration& eta : pivots) {
    if (basis.size() == rank) break;
    std::vector<double> v(ws.dim(), 0.0);
    v[ws.index(eta)] = 1.0;
    ws.project(v, spec);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        double c = dot(b, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    }
    double n = std::sqrt(dot(v, v));
    if (n < 1e-12) continue;
    for (double& x : v) x /= n;
    basis.push_back(std::move(v));
  }

  std::vector<ConfigVector> out;
  out.reserve(basis.size());
  for (const auto& b : basis) {
    ConfigVector phi;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (std::abs(b[i]) > 1e-15) phi.emplace(ws.config(i), b[i]);
    }
    out.push_back(std::move(phi));
  }
  return out;
}

Matrix<double> projector_matrix(const ProjectionSpec& spec, std::span<const VertexId> window) {
  const auto w = sorted_copy(window);
  require_inside(spec.sites(), w);
  WindowSpace ws(w, spec.m, std::size_t{1} << 12);
  Matrix<double> out(ws.dim(), ws.dim());
  for (std::size_t j = 0; j < ws.dim(); ++j) {
    std::vector<double> v(ws.dim(), 0.0);
    v[j] = 1.0;
    ws.project(v, spec);
    for (std::size_t i = 0; i < ws.dim(); ++i) out(i, j) = v[i];
  }
  return out;
}

std::size_t matrix_rank(const Matrix<double>& a, double tol) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tol);
  return static_cast<std::size_t>(lu.rank());
}

LampVector tensor(const ConfigVector& phi, std::span<const VertexId> walkers, std::span<const double> f) {
  if (walkers.size() != f.size()) throw std::invalid_argument("walker list and coefficients differ in length");
  LampAccumulator acc(phi.size() * walkers.size());
  for (const auto& [eta, amp] : phi) {
    for (std::size_t i = 0; i < walkers.size(); ++i) {
      if (f[i] != 0.0) acc.add(LampKey{eta, walkers[i]}, amp * f[i]);
    }
  }
  return acc.finish();
}

std::vector<Eigenfunction> build_eigenfunctions(const Animal& animal, const WalkKernel& k, int m,
                                                std::span<const VertexId> window) {
  const auto spec = ProjectionSpec::of(animal, m);
  const auto basis = range_basis(spec, window);
  const auto fk = truncate_kernel(k, animal.vertices);
  const auto sys = eig_symmetric(symmetrize(fk));

  std::vector<Eigenfunction> out;
  for (std::size_t a = 0; a < sys.eigenvalues.size(); ++a) {
    std::vector<double> f(fk.size());
    for (std::size_t i = 0; i < fk.size(); ++i) f[i] = std::sqrt(fk.weights[i]) * sys.eigenvectors(i, a);
    for (const ConfigVector& phi : basis) out.push_back({sys.eigenvalues[a], tensor(phi, fk.vertices, f)});
  }
  return out;
}

double verify_eigen(const Eigenfunction& pair, const LamplighterOperator& op) {
  LampVector diff = apply(op, pair.vector) - pair.vector.scaled(pair.lambda);
  return norm(diff, op.reversible_weights());
}

double gram_deviation(std::span<const Eigenfunction> fs, std::span<const double> walker_weight) {
  const auto n = static_cast<long>(fs.size());
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
  for (long i = 0; i < n; ++i) {
    for (long j = i; j < n; ++j) {
      Amplitude g = inner(fs[static_cast<std::size_t>(i)].vector, fs[static_cast<std::size_t>(j)].vector, walker_weight);
      if (i == j) g -= 1.0;
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

namespace {

// (Theta (x) I) v: the projection acts on the lamp part at each walker position
LampVector theta_lamps(const LampVector& v, const ProjectionSpec& spec) {
  LampAccumulator acc(v.support_size());
  auto entries = v.entries();
  std::size_t i = 0;
  while (i < entries.size()) {
    const VertexId x = entries[i].key.walker;
    ConfigVector part;
    for (; i < entries.size() && entries[i].key.walker == x; ++i) part.emplace(entries[i].key.config, entries[i].amp);
    for (const auto& [eta, amp] : theta_animal(part, spec)) acc.add(LampKey{eta, x}, amp);
  }
  return acc.finish();
}

}  // namespace

IntertwineReport intertwine_check(const Animal& animal, const LamplighterOperator& op,
                                  std::span<const VertexId> window, std::size_t trials, std::uint64_t seed) {
  const auto spec = ProjectionSpec::of(animal, op.lamps());
  const auto w = sorted_copy(window);
  require_inside(spec.sites(), w);
  const auto configs = window_configurations(w, op.lamps());
  const auto sites = spec.sites();
  const std::size_t total = configs.size() * sites.size();

  std::vector<std::size_t> cases(total);
  std::iota(cases.begin(), cases.end(), std::size_t{0});
  if (total > trials) {
    CounterRng rng(seed, 0);
    for (std::size_t i = 0; i < trials; ++i) {
      auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(total - i));
      std::swap(cases[i], cases[std::min(j, total - 1)]);
    }
    cases.resize(trials);
  }

  const WalkKernel& k = op.kernel();
  const auto weights = std::span<const double>(op.reversible_weights());
  IntertwineReport rep;
  for (std::size_t c : cases) {
    const Configuration& eta = configs[c / sites.size()];
    const VertexId x = sites[c % sites.size()];
    LampVector te = apply(op, LampVector::basis(eta, x));
    if (!animal.contains(x)) {
      rep.max_outside = std::max(rep.max_outside, norm(theta_lamps(te, spec).restrict_walkers(animal.vertices), weights));
      ++rep.checked;
      continue;
    }
    const ConfigVector theta_e = theta_animal(basis_config<Amplitude>(eta), spec);
    const double one = 1.0;
    LampVector lhs = apply(op, tensor(theta_e, std::span<const VertexId>(&x, 1), std::span<const double>(&one, 1)));
    std::vector<double> row(animal.size(), 0.0);
    for (std::size_t i = 0; i < animal.size(); ++i) row[i] = k.prob(x, animal.vertices[i]);
    LampVector rhs = tensor(theta_e, animal.vertices, row);
    rep.max_residual = std::max(rep.max_residual, norm(lhs - rhs, weights));
    rep.max_commutator = std::max(rep.max_commutator, norm(lhs - theta_lamps(te, spec), weights));
    ++rep.checked;
  }
  return rep;
}

namespace {

// m x m factor of Theta_{A,dA} at one site
Eigen::MatrixXd site_factor(const ProjectionSpec& s, VertexId x) {
  const Eigen::MatrixXd avg = Eigen::MatrixXd::Constant(s.m, s.m, 1.0 / s.m);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(s.m, s.m);
  if (std::binary_search(s.average_sites.begin(), s.average_sites.end(), x)) return avg;
  if (std::binary_search(s.complement_sites.begin(), s.complement_sites.end(), x)) return id - avg;
  return id;
}

}  // namespace

double annihilation_residual(const Animal& a, const Animal& b, int m) {
  const auto sa = ProjectionSpec::of(a, m);
  const auto sb = ProjectionSpec::of(b, m);
  std::vector<VertexId> w;
  const auto wa = sa.sites();
  const auto wb = sb.sites();
  std::set_union(wa.begin(), wa.end(), wb.begin(), wb.end(), std::back_inserter(w));
  // e_eta is a product vector, so the norm is a product of per-site column norms
  double worst = 1.0;
  for (VertexId x : w) worst *= (site_factor(sa, x) * site_factor(sb, x)).colwise().norm().maxCoeff();
  return worst;
}

double annihilation_residual_dense(const Animal& a, const Animal& b, int m) {
  const auto sa = ProjectionSpec::of(a, m);
  const auto sb = ProjectionSpec::of(b, m);
  auto w = sa.sites();
  const auto wb = sb.sites();
  w.insert(w.end(), wb.begin(), wb.end());
  const WindowSpace ws(w, m);
  const auto dim = static_cast<long>(ws.dim());
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long i = 0; i < dim; ++i) {
    std::vector<double> v(ws.dim(), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    ws.project(v, sb);
    ws.project(v, sa);
    worst = std::max(worst, std::sqrt(dot(v, v)));
  }
  return worst;
}

CompletenessReport completeness_probe(const Graph& g, VertexId root, int m, int max_size) {
  if (m < 2 || m > 255) throw std::invalid_argument("lamp count m must lie in [2, 255]");
  const auto animals = enumerate_animals(g, root, max_size);
  const double p = 1.0 / m;
  CompletenessReport rep;
  rep.animals = animals.size();
  rep.residual = residual_mass(g, root, p, animals, max_size).residual;

  std::vector<double> mass(animals.size()), closed(animals.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(animals.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const Animal& a = animals[static_cast<std::size_t>(i)];
      // ||Theta e||^2 = <Theta_1 e, Theta_2 e> with the site factors split in two halves
      ProjectionSpec first{{}, {}, m};
      ProjectionSpec second{{}, {}, m};
      std::size_t half = (a.size() + a.boundary_size()) / 2;
      std::size_t seen = 0;
      for (VertexId x : a.vertices) (seen++ < half ? first : second).average_sites.push_back(x);
      for (VertexId y : a.boundary) (seen++ < half ? first : second).complement_sites.push_back(y);
      const auto e = basis_config<Amplitude>(Configuration{});
      mass[static_cast<std::size_t>(i)] = inner(theta_animal(e, first), theta_animal(e, second)).real();
      closed[static_cast<std::size_t>(i)] = std::pow(p, static_cast<double>(a.size())) *
                                            std::pow(1.0 - p, static_cast<double>(a.boundary_size()));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < animals.size(); ++i) {
    rep.mass += mass[i];
    rep.closed_form += closed[i];
    rep.max_deviation = std::max(rep.max_deviation, std::abs(mass[i] - closed[i]));
  }
  rep.root_conditioned = rep.mass * m;
  return rep;
}

}  // namespace lamplighter
