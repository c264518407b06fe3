#pragma once

#include <boost/container/small_vector.hpp>

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lamplighter/graph.hpp"

namespace lamplighter {

using Lamp = std::uint8_t;
using Amplitude = std::complex<double>;

/// Finitely supported lamp configuration; lamps in state 0 are not stored.
class Configuration {
 public:
  Configuration() = default;

  Lamp lamp(VertexId site) const;
  void set(VertexId site, Lamp value);
  Configuration with(VertexId site, Lamp value) const {
    Configuration c = *this;
    c.set(site, value);
    return c;
  }

  std::size_t support_size() const { return packed_.size(); }
  bool empty() const { return packed_.empty(); }
  /// Lit sites in increasing order with their lamp values.
  std::vector<std::pair<VertexId, Lamp>> lit() const;
  /// Lamps of this configuration live only on sites in `window` (sorted).
  bool supported_in(std::span<const VertexId> window) const;

  std::size_t hash() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration& l, const Configuration& r) {
    return std::lexicographical_compare_three_way(l.packed_.begin(), l.packed_.end(), r.packed_.begin(),
                                                  r.packed_.end());
  }

 private:
  static std::uint32_t pack(VertexId site, Lamp v) { return (site << 8) | v; }
  // (site << 8 | lamp), sorted by site
  boost::container::small_vector<std::uint32_t, 8> packed_;
};

/// Order used for Gram-Schmidt pivots: support size, then (site, lamp)
/// lexicographically.
inline bool canonical_less(const Configuration& l, const Configuration& r) {
  if (l.support_size() != r.support_size()) return l.support_size() < r.support_size();
  return l < r;
}

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const { return c.hash(); }
};

/// Basis index (eta, x) of l2(configurations x vertices).
struct LampKey {
  Configuration config;
  VertexId walker = 0;

  friend bool operator==(const LampKey&, const LampKey&) = default;
  friend auto operator<=>(const LampKey& l, const LampKey& r) {
    if (auto c = l.walker <=> r.walker; c != 0) return c;
    return l.config <=> r.config;
  }
};

struct LampKeyHash {
  std::size_t operator()(const LampKey& k) const { return k.config.hash() * 0x9e3779b97f4a7c15ULL ^ k.walker; }
};

struct LampEntry {
  LampKey key;
  Amplitude amp;
};

/// Finitely supported vector in l2(configurations x vertices), stored as
/// entries sorted by key.
class LampVector {
 public:
  LampVector() = default;

  static LampVector basis(Configuration eta, VertexId walker);

  std::span<const LampEntry> entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Amplitude at(const Configuration& eta, VertexId walker) const;

  LampVector scaled(Amplitude s) const;
  friend LampVector operator+(const LampVector& u, const LampVector& v);
  friend LampVector operator-(const LampVector& u, const LampVector& v);

  /// Entries whose walker lies in `sites` (sorted): the amplification of P_A.
  LampVector restrict_walkers(std::span<const VertexId> sites) const;

 private:
  friend class LampAccumulator;
  std::vector<LampEntry> entries_;
};

/// Hash-map accumulator producing a canonical LampVector.
class LampAccumulator {
 public:
  explicit LampAccumulator(std::size_t expected = 0) { map_.reserve(expected); }
  void add(const LampKey& key, Amplitude amp) { map_[key] += amp; }
  void add(LampKey&& key, Amplitude amp) { map_[std::move(key)] += amp; }
  LampVector finish();

 private:
  std::unordered_map<LampKey, Amplitude, LampKeyHash> map_;
};

/// Standard inner product sum conj(u) v.
Amplitude inner(const LampVector& u, const LampVector& v);
/// Inner product with walker weights w[x] (entries of weight 0 vanish).
Amplitude inner(const LampVector& u, const LampVector& v, std::span<const double> walker_weight);
double norm(const LampVector& v);
double norm(const LampVector& v, std::span<const double> walker_weight);

}  // namespace lamplighter
