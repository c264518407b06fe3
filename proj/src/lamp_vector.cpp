#include "lamplighter/lamp_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lamplighter {

Lamp Configuration::lamp(VertexId site) const {
  auto it = std::lower_bound(packed_.begin(), packed_.end(), pack(site, 0));
  if (it != packed_.end() && (*it >> 8) == site) return static_cast<Lamp>(*it & 0xff);
  return 0;
}

void Configuration::set(VertexId site, Lamp value) {
  if (site >= (1u << 24)) throw std::out_of_range("lamp site id too large");
  auto it = std::lower_bound(packed_.begin(), packed_.end(), pack(site, 0));
  bool present = it != packed_.end() && (*it >> 8) == site;
  if (value == 0) {
    if (present) packed_.erase(it);
  } else if (present) {
    *it = pack(site, value);
  } else {
    packed_.insert(it, pack(site, value));
  }
}

std::vector<std::pair<VertexId, Lamp>> Configuration::lit() const {
  std::vector<std::pair<VertexId, Lamp>> out;
  out.reserve(packed_.size());
  for (auto v : packed_) out.emplace_back(v >> 8, static_cast<Lamp>(v & 0xff));
  return out;
}

bool Configuration::supported_in(std::span<const VertexId> window) const {
  return std::all_of(packed_.begin(), packed_.end(),
                     [&](std::uint32_t v) { return std::binary_search(window.begin(), window.end(), v >> 8); });
}

std::size_t Configuration::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto v : packed_) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

LampVector LampVector::basis(Configuration eta, VertexId walker) {
  LampVector v;
  v.entries_.push_back({{std::move(eta), walker}, Amplitude(1.0)});
  return v;
}

Amplitude LampVector::at(const Configuration& eta, VertexId walker) const {
  LampKey key{eta, walker};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const LampEntry& e, const LampKey& k) { return e.key < k; });
  if (it != entries_.end() && it->key == key) return it->amp;
  return Amplitude(0.0);
}

LampVector LampVector::scaled(Amplitude s) const {
  LampVector out = *this;
  for (auto& e : out.entries_) e.amp *= s;
  return out;
}

namespace {

template <class Op>
LampVector merge(const std::vector<LampEntry>& a, const std::vector<LampEntry>& b, Op op) {
  LampAccumulator acc(a.size() + b.size());
  for (const auto& e : a) acc.add(e.key, e.amp);
  for (const auto& e : b) acc.add(e.key, op(e.amp));
  return acc.finish();
}

}  // namespace

LampVector operator+(const LampVector& u, const LampVector& v) {
  return merge(u.entries_, v.entries_, [](Amplitude z) { return z; });
}

LampVector operator-(const LampVector& u, const LampVector& v) {
  return merge(u.entries_, v.entries_, [](Amplitude z) { return -z; });
}

LampVector LampVector::restrict_walkers(std::span<const VertexId> sites) const {
  LampVector out;
  for (const auto& e : entries_) {
    if (std::binary_search(sites.begin(), sites.end(), e.key.walker)) out.entries_.push_back(e);
  }
  return out;
}

LampVector LampAccumulator::finish() {
  LampVector v;
  v.entries_.reserve(map_.size());
  for (auto& [key, amp] : map_) {
    if (amp != Amplitude(0.0)) v.entries_.push_back({key, amp});
  }
  map_.clear();
  std::sort(v.entries_.begin(), v.entries_.end(), [](const LampEntry& l, const LampEntry& r) { return l.key < r.key; });
  return v;
}

namespace {

template <class Weight>
Amplitude merge_inner(std::span<const LampEntry> a, std::span<const LampEntry> b, Weight weight) {
  Amplitude sum(0.0);
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    auto c = i->key <=> j->key;
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      sum += std::conj(i->amp) * j->amp * weight(i->key.walker);
      ++i;
      ++j;
    }
  }
  return sum;
}

}  // namespace

Amplitude inner(const LampVector& u, const LampVector& v) {
  return merge_inner(u.entries(), v.entries(), [](VertexId) { return 1.0; });
}

Amplitude inner(const LampVector& u, const LampVector& v, std::span<const double> walker_weight) {
  return merge_inner(u.entries(), v.entries(), [&](VertexId x) { return walker_weight[x]; });
}

double norm(const LampVector& v) {
  double s = 0.0;
  for (const auto& e : v.entries()) s += std::norm(e.amp);
  return std::sqrt(s);
}

double norm(const LampVector& v, std::span<const double> walker_weight) {
  double s = 0.0;
  for (const auto& e : v.entries()) s += std::norm(e.amp) * walker_weight[e.key.walker];
  return std::sqrt(s);
}

}  // namespace lamplighter
