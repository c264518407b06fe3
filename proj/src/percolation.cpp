#include "lamplighter/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace lamplighter {

namespace {
constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + golden_gamma) ^ (stream * 0xd1342543de82ef95ULL + 1))) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix(key_ + counter_ * golden_gamma);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

ClusterSample sample_cluster(const Graph& g, VertexId root, double p, int radius, CounterRng& rng,
                             std::size_t cap) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  if (root >= g.size()) throw GraphError("root not in graph");

  ClusterSample s;
  s.root_open = rng.uniform() < p;
  if (!s.root_open) return s;

  // 0 = unexplored, 1 = open, 2 = closed
  std::unordered_map<VertexId, int> depth;
  std::unordered_map<VertexId, char> state;
  state[root] = 1;
  depth[root] = 0;
  s.cluster.push_back(root);
  for (std::size_t head = 0; head < s.cluster.size(); ++head) {
    VertexId v = s.cluster[head];
    int d = depth[v];
    if (d == radius) continue;
    if (g.frontier(v)) throw GraphError("cluster exploration reached a truncated frontier inside the ball");
    for (const Edge& e : g.neighbours(v)) {
      auto [it, fresh] = state.try_emplace(e.to, 0);
      if (!fresh) continue;
      if (rng.uniform() < p) {
        it->second = 1;
        if (s.cluster.size() >= cap) {
          s.truncated = true;
          return s;
        }
        depth[e.to] = d + 1;
        s.cluster.push_back(e.to);
      } else {
        it->second = 2;
      }
    }
  }
  return s;
}

std::vector<double> cluster_return_probabilities(const WalkKernel& k, const ClusterSample& sample,
                                                 VertexId root, int n_max) {
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  out[0] = 1.0;
  if (!sample.root_open || n_max == 0) return out;

  const auto& c = sample.cluster;
  std::unordered_map<VertexId, std::size_t> local;
  local.reserve(c.size() * 2);
  for (std::size_t i = 0; i < c.size(); ++i) local.emplace(c[i], i);

  // sparse rows of T_C in local indices
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const Transition& t : k.row(c[i])) {
      auto it = local.find(t.to);
      if (it != local.end()) rows[i].emplace_back(it->second, t.prob);
    }
  }
  // w_n = T_C^n e_root as a column; the diagonal entry is w_n[root]
  std::vector<double> w(c.size(), 0.0), next(c.size(), 0.0);
  const std::size_t r = local.at(root);
  w[r] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      double acc = 0.0;
      for (auto [j, pr] : rows[i]) acc += pr * w[j];
      next[i] = acc;
    }
    std::swap(w, next);
    out[static_cast<std::size_t>(n)] = w[r];
  }
  return out;
}

namespace {

void check_mc_args(const Graph& g, VertexId root, double p, int n_max, std::size_t samples) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (n_max < 0) throw std::invalid_argument("n must be nonnegative");
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  if (root >= g.size()) throw GraphError("root not in graph");
}

McReport reduce(std::vector<std::vector<double>>& values, const std::vector<char>& capped, double p, int n_max,
                std::uint64_t seed) {
  McReport rep;
  rep.samples = values.size();
  rep.seed = seed;
  rep.p = p;
  rep.n_max = n_max;
  rep.capped = static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1));
  const auto n_terms = static_cast<std::size_t>(n_max) + 1;
  const double count = static_cast<double>(values.size());
  rep.estimate.assign(n_terms, 0.0);
  rep.standard_error.assign(n_terms, 0.0);
  for (std::size_t n = 0; n < n_terms; ++n) {
    double sum = 0.0;
    for (const auto& v : values) sum += v[n];
    double mean = sum / count;
    double ss = 0.0;
    for (const auto& v : values) ss += (v[n] - mean) * (v[n] - mean);
    rep.estimate[n] = mean;
    rep.standard_error[n] = values.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
  }
  return rep;
}

}  // namespace

McReport mc_expected_return(const Graph& g, VertexId root, double p, int n_max, std::size_t samples,
                            std::uint64_t seed, std::size_t cap) {
  check_mc_args(g, root, p, n_max, samples);
  const WalkKernel k(g);
  const int radius = n_max / 2;
  std::vector<std::vector<double>> values(samples);
  std::vector<char> capped(samples, 0);
  std::exception_ptr failure;
  const auto count = static_cast<long>(samples);

#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    try {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      auto s = sample_cluster(g, root, p, radius, rng, cap);
      capped[i] = s.truncated ? 1 : 0;
      values[i] = cluster_return_probabilities(k, s, root, n_max);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(values, capped, p, n_max, seed);
}

namespace reference {

McReport mc_expected_return(const Graph& g, VertexId root, double p, int n_max, std::size_t samples,
                            std::uint64_t seed, std::size_t cap) {
  check_mc_args(g, root, p, n_max, samples);
  const WalkKernel k(g);
  const int radius = n_max / 2;
  std::vector<std::vector<double>> values(samples);
  std::vector<char> capped(samples, 0);
  for (std::size_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    auto s = sample_cluster(g, root, p, radius, rng, cap);
    capped[i] = s.truncated ? 1 : 0;
    values[i] = cluster_return_probabilities(k, s, root, n_max);
  }
  return reduce(values, capped, p, n_max, seed);
}

}  // namespace reference

MassEstimate finite_cluster_mass_mc(const Graph& g, VertexId root, double p, int radius, std::size_t samples,
                                    std::uint64_t seed) {
  const auto dist = distances(g, root);
  std::vector<double> hit(samples, 0.0);
  const auto count = static_cast<long>(samples);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    auto s = sample_cluster(g, root, p, radius, rng);
    bool finite = s.root_open && !s.truncated &&
                  std::none_of(s.cluster.begin(), s.cluster.end(), [&](VertexId v) { return dist[v] >= radius; });
    hit[i] = finite ? 1.0 : 0.0;
  }
  double sum = 0.0;
  for (double h : hit) sum += h;
  double mean = sum / static_cast<double>(samples);
  return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(samples))};
}

}  // namespace lamplighter
