#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lamplighter/graph.hpp"
#include "lamplighter/kernel.hpp"

namespace lamplighter {

/// Counter-based generator: the k-th draw of stream s is a SplitMix64
/// finalisation of (key(seed, s) + k * gamma). Streams are independent of
/// the order in which they are consumed, which makes parallel sampling
/// reproducible.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline constexpr std::size_t default_cluster_cap = 100'000;

struct ClusterSample {
  bool root_open = false;
  std::vector<VertexId> cluster;  // breadth-first from the root; empty when root closed
  bool truncated = false;         // exploration stopped at the cap
};

/// Open cluster of `root` inside ball(g, root, radius), with sites opened
/// lazily in breadth-first order as the exploration reaches them.
ClusterSample sample_cluster(const Graph& g, VertexId root, double p, int radius, CounterRng& rng,
                             std::size_t cap = default_cluster_cap);

/// Monte Carlo estimate of E[(T_C^n)(root, root)] for n = 0..n_max.
struct McReport {
  std::vector<double> estimate;
  std::vector<double> standard_error;
  std::size_t samples = 0;
  std::size_t capped = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
  int n_max = 0;
};

/// Sample i uses stream i of `seed`; the per-sample values are reduced in
/// index order, so the result does not depend on the thread count.
McReport mc_expected_return(const Graph& g, VertexId root, double p, int n_max, std::size_t samples,
                            std::uint64_t seed, std::size_t cap = default_cluster_cap);

/// Return probabilities (T_C^n)(root, root), n = 0..n_max, of the absorbing
/// walk on a sampled cluster (all zero past n = 0 when the root is closed).
std::vector<double> cluster_return_probabilities(const WalkKernel& k, const ClusterSample& sample,
                                                 VertexId root, int n_max);

struct MassEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// Estimates P[root open, cluster stays strictly inside the ball] on a ball
/// materialized with the given radius.
MassEstimate finite_cluster_mass_mc(const Graph& g, VertexId root, double p, int radius, std::size_t samples,
                                    std::uint64_t seed);

namespace reference {
McReport mc_expected_return(const Graph& g, VertexId root, double p, int n_max, std::size_t samples,
                            std::uint64_t seed, std::size_t cap = default_cluster_cap);
}  // namespace reference

}  // namespace lamplighter
