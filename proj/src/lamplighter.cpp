#include "lamplighter/lamplighter.hpp"

#include <atomic>
#include <exception>

namespace lamplighter {

LamplighterOperator::LamplighterOperator(WalkKernel kernel, int m) : kernel_(std::move(kernel)), m_(m) {
  if (m < 2 || m > 255) throw std::invalid_argument("lamp count m must lie in [2, 255]");
  inv_weight_.resize(kernel_.size());
  for (VertexId x = 0; x < kernel_.size(); ++x) inv_weight_[x] = 1.0 / kernel_.weight(x);
}

LampVector apply(const LamplighterOperator& op, const LampVector& v) {
  const WalkKernel& k = op.kernel();
  const int m = op.lamps();
  const double scale = 1.0 / (static_cast<double>(m) * m);
  LampAccumulator acc(v.support_size() * 4 * static_cast<std::size_t>(m * m));
  for (const LampEntry& e : v.entries()) {
    const VertexId x = e.key.walker;
    if (k.frontier(x)) throw GraphError("lamp vector support reaches a truncated frontier vertex");
    for (const Transition& t : k.row(x)) {
      const Amplitude a = e.amp * (t.prob * scale);
      for (int s = 0; s < m; ++s) {
        Configuration at_x = e.key.config.with(x, static_cast<Lamp>(s));
        for (int u = 0; u < m; ++u) {
          acc.add(LampKey{at_x.with(t.to, static_cast<Lamp>(u)), t.to}, a);
        }
      }
    }
  }
  return acc.finish();
}

namespace {

template <class T>
T step_prob(const WalkKernel& k, VertexId x, const Transition& t);
template <>
double step_prob<double>(const WalkKernel&, VertexId, const Transition& t) {
  return t.prob;
}
template <>
Rational step_prob<Rational>(const WalkKernel& k, VertexId x, const Transition& t) {
  return k.exact_prob(x, t.to);
}

void check_lamps(int m) {
  if (m < 2 || m > 255) throw std::invalid_argument("lamp count m must lie in [2, 255]");
}

void check_frontier_depth(const Graph& g, std::span<const VertexId> order, const std::vector<int>& dist, int radius) {
  for (VertexId v : order) {
    if (dist[v] < radius && g.frontier(v)) {
      throw GraphError("graph was truncated too close to the root: frontier vertex " + g.name(v) +
                       " at distance " + std::to_string(dist[v]) + " < " + std::to_string(radius));
    }
  }
}

}  // namespace

template <class T>
std::vector<T> return_prob_config_space(const Graph& g, VertexId root, int m, int n_max, std::size_t state_budget) {
  check_lamps(m);
  if (n_max < 0) throw std::invalid_argument("n must be nonnegative");
  const int radius = n_max / 2;
  const auto sites = ball(g, root, radius);
  const auto dist = distances(g, root);
  check_frontier_depth(g, sites, dist, radius);
  const WalkKernel k(g);

  const std::size_t nb = sites.size();
  std::vector<std::size_t> pow_m(nb + 1, 1);
  for (std::size_t i = 1; i <= nb; ++i) {
    if (pow_m[i - 1] > state_budget / static_cast<std::size_t>(m)) {
      throw BudgetError("config-space chain needs m^" + std::to_string(nb) + " x " + std::to_string(nb) +
                        " states, over the budget of " + std::to_string(state_budget));
    }
    pow_m[i] = pow_m[i - 1] * static_cast<std::size_t>(m);
  }
  const std::size_t configs = pow_m[nb];
  if (configs > state_budget / nb) {
    throw BudgetError("config-space chain needs " + std::to_string(configs) + " x " + std::to_string(nb) +
                      " states, over the budget of " + std::to_string(state_budget));
  }
  const std::size_t states = configs * nb;

  std::vector<long> local(g.size(), -1);
  for (std::size_t i = 0; i < nb; ++i) local[sites[i]] = static_cast<long>(i);
  std::vector<std::vector<std::pair<std::size_t, T>>> moves(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    for (const Transition& t : k.row(sites[i])) {
      if (local[t.to] >= 0) moves[i].emplace_back(static_cast<std::size_t>(local[t.to]), step_prob<T>(k, sites[i], t));
    }
  }

  const T inv_m = T(1) / T(m);
  std::vector<T> cur(states, T(0)), tmp(states, T(0));

  // randomize the lamp under the walker: state (c, pos) spreads over m lamp values
  auto switch_lamp = [&](const std::vector<T>& in, std::vector<T>& out) {
    for (auto& x : out) x = 0;
    for (std::size_t c = 0; c < configs; ++c) {
      for (std::size_t pos = 0; pos < nb; ++pos) {
        const T& val = in[c * nb + pos];
        if (is_zero(val)) continue;
        const std::size_t digit = (c / pow_m[pos]) % static_cast<std::size_t>(m);
        const std::size_t base = c - digit * pow_m[pos];
        T share = val * inv_m;
        for (std::size_t s = 0; s < static_cast<std::size_t>(m); ++s) out[(base + s * pow_m[pos]) * nb + pos] += share;
      }
    }
  };
  auto move = [&](const std::vector<T>& in, std::vector<T>& out) {
    for (auto& x : out) x = 0;
    for (std::size_t c = 0; c < configs; ++c) {
      for (std::size_t pos = 0; pos < nb; ++pos) {
        const T& val = in[c * nb + pos];
        if (is_zero(val)) continue;
        for (const auto& [to, pr] : moves[pos]) out[c * nb + to] += val * pr;
      }
    }
  };

  const std::size_t start = static_cast<std::size_t>(local[root]);
  cur[start] = 1;
  std::vector<T> out{T(1)};
  for (int n = 1; n <= n_max; ++n) {
    switch_lamp(cur, tmp);
    move(tmp, cur);
    switch_lamp(cur, tmp);
    std::swap(cur, tmp);
    out.push_back(cur[start]);
  }
  return out;
}

namespace {

template <class T>
class PathDfs {
 public:
  PathDfs(const WalkKernel& k, const std::vector<std::vector<T>>& probs, const std::vector<int>& dist,
          VertexId root, int n_max, std::size_t budget, std::atomic<std::size_t>& nodes)
      : k_(k), probs_(probs), dist_(dist), root_(root), n_max_(n_max), budget_(budget), nodes_(nodes),
        visits_(k.size(), 0), prod_(static_cast<std::size_t>(n_max) + 1, T(0)),
        sums_(static_cast<std::size_t>(n_max) + 1, std::vector<T>(static_cast<std::size_t>(n_max) + 2, T(0))) {}

  void enter(VertexId x) {
    if (visits_[x]++ == 0) ++distinct_;
  }
  void leave(VertexId x) {
    if (--visits_[x] == 0) --distinct_;
  }
  void set_prod(int depth, const T& value) { prod_[static_cast<std::size_t>(depth)] = value; }

  void run(VertexId x, int depth) {
    if (nodes_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
      throw BudgetError("path enumeration exceeded its budget of " + std::to_string(budget_) + " steps");
    }
    const auto d = static_cast<std::size_t>(depth);
    if (depth > 0 && x == root_) sums_[d][static_cast<std::size_t>(distinct_)] += prod_[d];
    if (depth == n_max_) return;
    const int remaining = n_max_ - depth;
    if (k_.frontier(x) && remaining >= dist_[x] + 2) {
      throw GraphError("closed paths reach beyond the truncated graph");
    }
    const auto row = k_.row(x);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const VertexId y = row[i].to;
      if (dist_[y] > remaining - 1) continue;
      prod_[d + 1] = prod_[d] * probs_[x][i];
      enter(y);
      run(y, depth + 1);
      leave(y);
    }
  }

  const std::vector<std::vector<T>>& sums() const { return sums_; }

 private:
  const WalkKernel& k_;
  const std::vector<std::vector<T>>& probs_;
  const std::vector<int>& dist_;
  VertexId root_;
  int n_max_;
  std::size_t budget_;
  std::atomic<std::size_t>& nodes_;
  std::vector<int> visits_;
  int distinct_ = 0;
  std::vector<T> prod_;
  std::vector<std::vector<T>> sums_;  // [length][distinct vertices]
};

template <class T>
struct PathSetup {
  WalkKernel k;
  std::vector<std::vector<T>> probs;
  std::vector<int> dist;
};

template <class T>
PathSetup<T> path_setup(const Graph& g, VertexId root, int m, int n_max) {
  check_lamps(m);
  if (n_max < 0) throw std::invalid_argument("n must be nonnegative");
  if (root >= g.size()) throw GraphError("root not in graph");
  PathSetup<T> s{WalkKernel(g), {}, distances(g, root)};
  s.probs.resize(g.size());
  for (VertexId x = 0; x < g.size(); ++x) {
    for (const Transition& t : s.k.row(x)) s.probs[x].push_back(step_prob<T>(s.k, x, t));
  }
  return s;
}

template <class T>
std::vector<T> fold_sums(const std::vector<std::vector<T>>& sums, int m, int n_max) {
  std::vector<T> inv_pow(static_cast<std::size_t>(n_max) + 2, T(1));
  for (std::size_t d = 1; d < inv_pow.size(); ++d) inv_pow[d] = inv_pow[d - 1] / T(m);
  std::vector<T> out(static_cast<std::size_t>(n_max) + 1, T(0));
  out[0] = T(1);
  for (std::size_t n = 1; n < out.size(); ++n) {
    for (std::size_t d = 0; d < inv_pow.size(); ++d) {
      if (!is_zero(sums[n][d])) out[n] += sums[n][d] * inv_pow[d];
    }
  }
  return out;
}

}  // namespace

template <class T>
std::vector<T> return_prob_path_sum(const Graph& g, VertexId root, int m, int n_max, std::size_t path_budget) {
  auto setup = path_setup<T>(g, root, m, n_max);
  if (n_max == 0) return {T(1)};
  std::atomic<std::size_t> nodes{0};
  const auto first = setup.k.row(root);
  const auto branches = static_cast<long>(first.size());
  std::vector<std::vector<std::vector<T>>> partial(first.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < branches; ++i) {
    try {
      const VertexId y = first[static_cast<std::size_t>(i)].to;
      PathDfs<T> dfs(setup.k, setup.probs, setup.dist, root, n_max, path_budget, nodes);
      dfs.enter(root);
      dfs.set_prod(0, T(1));
      if (setup.dist[y] <= n_max - 1) {
        dfs.set_prod(1, setup.probs[root][static_cast<std::size_t>(i)]);
        dfs.enter(y);
        dfs.run(y, 1);
      }
      partial[static_cast<std::size_t>(i)] = dfs.sums();
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  auto total = partial.front();
  for (std::size_t b = 1; b < partial.size(); ++b) {
    for (std::size_t n = 0; n < total.size(); ++n) {
      for (std::size_t d = 0; d < total[n].size(); ++d) total[n][d] += partial[b][n][d];
    }
  }
  return fold_sums(total, m, n_max);
}

namespace reference {

template <class T>
std::vector<T> return_prob_path_sum(const Graph& g, VertexId root, int m, int n_max, std::size_t path_budget) {
  auto setup = path_setup<T>(g, root, m, n_max);
  std::atomic<std::size_t> nodes{0};
  PathDfs<T> dfs(setup.k, setup.probs, setup.dist, root, n_max, path_budget, nodes);
  dfs.enter(root);
  dfs.set_prod(0, T(1));
  dfs.run(root, 0);
  return fold_sums(dfs.sums(), m, n_max);
}

}  // namespace reference

namespace {

template <class T>
std::vector<T> animal_diagonal(const WalkKernel& k, const Animal& a, int n_max);

template <>
std::vector<double> animal_diagonal<double>(const WalkKernel& k, const Animal& a, int n_max) {
  auto fk = truncate_kernel(k, a.vertices);
  return diagonal_powers(symmetrize(fk), fk.index_of(a.root), n_max);
}

template <>
std::vector<Rational> animal_diagonal<Rational>(const WalkKernel& k, const Animal& a, int n_max) {
  auto fk = truncate_kernel_exact(k, a.vertices);
  return diagonal_powers(fk.p, fk.index_of(a.root), n_max);
}

template <class T>
void check_probability(const T& p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("percolation parameter must lie in (0,1)");
}

template <class T>
AnimalSum<T> start_sum(const T& p, int n_max, std::size_t animals, double residual) {
  AnimalSum<T> s;
  s.values.assign(static_cast<std::size_t>(n_max) + 1, T(0));
  s.values[0] = T(1) - p;  // closed root: return probability 1 at n = 0 only
  s.error_bound = residual;
  s.animals = animals;
  return s;
}

}  // namespace

template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max,
                                        std::span<const Animal> animals, double residual) {
  check_probability(p);
  if (n_max < 0) throw std::invalid_argument("n must be nonnegative");
  const WalkKernel k(g);
  const auto count = static_cast<long>(animals.size());
  std::vector<std::vector<T>> terms(animals.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const Animal& a = animals[static_cast<std::size_t>(i)];
      if (a.root != root) throw std::invalid_argument("animal rooted elsewhere");
      auto diag = animal_diagonal<T>(k, a, n_max);
      T weight = animal_probability(a, p);
      for (auto& d : diag) d *= weight;
      terms[static_cast<std::size_t>(i)] = std::move(diag);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  auto sum = start_sum(p, n_max, animals.size(), residual);
  for (const auto& term : terms) {
    for (std::size_t n = 0; n < term.size(); ++n) sum.values[n] += term[n];
  }
  return sum;
}

template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max, int max_size) {
  check_probability(p);
  auto animals = enumerate_animals(g, root, max_size);
  double residual = residual_mass(g, root, to_double(p), animals, max_size).residual;
  return expected_return_animal_sum<T>(g, root, p, n_max, animals, residual);
}

namespace reference {

template <class T>
AnimalSum<T> expected_return_animal_sum(const Graph& g, VertexId root, const T& p, int n_max,
                                        std::span<const Animal> animals, double residual) {
  check_probability(p);
  const WalkKernel k(g);
  auto sum = start_sum(p, n_max, animals.size(), residual);
  for (const Animal& a : animals) {
    auto diag = animal_diagonal<T>(k, a, n_max);
    T weight = animal_probability(a, p);
    for (std::size_t n = 0; n < diag.size(); ++n) sum.values[n] += diag[n] * weight;
  }
  return sum;
}

template std::vector<double> return_prob_path_sum<double>(const Graph&, VertexId, int, int, std::size_t);
template std::vector<Rational> return_prob_path_sum<Rational>(const Graph&, VertexId, int, int, std::size_t);
template AnimalSum<double> expected_return_animal_sum<double>(const Graph&, VertexId, const double&, int,
                                                              std::span<const Animal>, double);
template AnimalSum<Rational> expected_return_animal_sum<Rational>(const Graph&, VertexId, const Rational&, int,
                                                                  std::span<const Animal>, double);

}  // namespace reference

template std::vector<double> return_prob_config_space<double>(const Graph&, VertexId, int, int, std::size_t);
template std::vector<Rational> return_prob_config_space<Rational>(const Graph&, VertexId, int, int, std::size_t);
template std::vector<double> return_prob_path_sum<double>(const Graph&, VertexId, int, int, std::size_t);
template std::vector<Rational> return_prob_path_sum<Rational>(const Graph&, VertexId, int, int, std::size_t);
template AnimalSum<double> expected_return_animal_sum<double>(const Graph&, VertexId, const double&, int, int);
template AnimalSum<Rational> expected_return_animal_sum<Rational>(const Graph&, VertexId, const Rational&, int, int);
template AnimalSum<double> expected_return_animal_sum<double>(const Graph&, VertexId, const double&, int,
                                                              std::span<const Animal>, double);
template AnimalSum<Rational> expected_return_animal_sum<Rational>(const Graph&, VertexId, const Rational&, int,
                                                                  std::span<const Animal>, double);

}  // namespace lamplighter
