#include "lamplighter/animals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>

#include "lamplighter/percolation.hpp"

namespace lamplighter {

bool Animal::contains(VertexId v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }

std::vector<VertexId> boundary(const Graph& g, std::span<const VertexId> a) {
  std::vector<VertexId> inside(a.begin(), a.end());
  std::sort(inside.begin(), inside.end());
  std::vector<VertexId> out;
  for (VertexId x : inside) {
    if (g.frontier(x)) {
      throw GraphError("vertex " + g.name(x) + " lies on a truncated frontier; materialize a larger ball");
    }
    for (const Edge& e : g.neighbours(x)) {
      if (!std::binary_search(inside.begin(), inside.end(), e.to)) out.push_back(e.to);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_connected(const Graph& g, std::span<const VertexId> a) {
  if (a.empty()) return false;
  std::vector<VertexId> inside(a.begin(), a.end());
  std::sort(inside.begin(), inside.end());
  std::vector<char> reached(inside.size(), 0);
  std::vector<std::size_t> stack{0};
  reached[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    VertexId v = inside[stack.back()];
    stack.pop_back();
    for (const Edge& e : g.neighbours(v)) {
      auto it = std::lower_bound(inside.begin(), inside.end(), e.to);
      if (it == inside.end() || *it != e.to) continue;
      auto idx = static_cast<std::size_t>(it - inside.begin());
      if (!reached[idx]) {
        reached[idx] = 1;
        ++count;
        stack.push_back(idx);
      }
    }
  }
  return count == inside.size();
}

namespace {

bool animal_less(const Animal& l, const Animal& r) {
  if (l.size() != r.size()) return l.size() < r.size();
  return l.vertices < r.vertices;
}

// Redelmeier-style growth: every vertex placed on the untried list is marked
// seen, and a vertex popped from the list stays excluded for the rest of its
// sibling loop. Each connected set containing the root is produced once.
class Grower {
 public:
  Grower(const Graph& g, VertexId root, std::size_t max_size, std::size_t budget, std::atomic<std::size_t>& emitted)
      : g_(g), root_(root), max_size_(max_size), budget_(budget), emitted_(emitted), seen_(g.size(), 0) {}

  void mark(VertexId v) { seen_[v] = 1; }
  void push(VertexId v) { current_.push_back(v); }

  void emit() {
    if (emitted_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_) {
      throw BudgetError("animal enumeration budget of " + std::to_string(budget_) + " exceeded at size " +
                        std::to_string(current_.size()));
    }
    Animal a;
    a.root = root_;
    a.vertices = current_;
    std::sort(a.vertices.begin(), a.vertices.end());
    a.boundary = boundary(g_, a.vertices);
    out_.push_back(std::move(a));
  }

  void grow(std::vector<VertexId> untried) {
    while (!untried.empty()) {
      VertexId v = untried.back();
      untried.pop_back();
      current_.push_back(v);
      emit();
      if (current_.size() < max_size_) extend_from(v, untried);
      current_.pop_back();
    }
  }

  // recurse with `untried` plus the unseen neighbours of v
  void extend_from(VertexId v, const std::vector<VertexId>& untried) {
    std::vector<VertexId> next = untried;
    std::size_t first_new = next.size();
    for (const Edge& e : g_.neighbours(v)) {
      if (!seen_[e.to]) {
        seen_[e.to] = 1;
        next.push_back(e.to);
      }
    }
    std::vector<VertexId> fresh(next.begin() + static_cast<long>(first_new), next.end());
    grow(std::move(next));
    for (VertexId u : fresh) seen_[u] = 0;
  }

  std::vector<Animal> take() { return std::move(out_); }

 private:
  const Graph& g_;
  VertexId root_;
  std::size_t max_size_;
  std::size_t budget_;
  std::atomic<std::size_t>& emitted_;
  std::vector<char> seen_;
  std::vector<VertexId> current_;
  std::vector<Animal> out_;
};

void check_args(const Graph& g, VertexId root, int max_size) {
  if (g.is_lazy()) throw GraphError("animal enumeration needs a materialized graph");
  if (root >= g.size()) throw GraphError("root not in graph");
  if (max_size < 1) throw std::invalid_argument("max_size must be at least 1");
}

}  // namespace

namespace reference {

std::vector<Animal> enumerate_animals(const Graph& g, VertexId root, int max_size, std::size_t budget) {
  check_args(g, root, max_size);
  std::atomic<std::size_t> emitted{0};
  Grower grower(g, root, static_cast<std::size_t>(max_size), budget, emitted);
  grower.mark(root);
  grower.grow({root});
  auto out = grower.take();
  std::sort(out.begin(), out.end(), animal_less);
  return out;
}

}  // namespace reference

std::vector<Animal> enumerate_animals(const Graph& g, VertexId root, int max_size, std::size_t budget) {
  check_args(g, root, max_size);
  std::atomic<std::size_t> emitted{0};

  // The root is emitted once; afterwards the branch that adds neighbour i of
  // the root sees neighbours 0..i-1 still untried, i+1.. already excluded.
  Grower head(g, root, static_cast<std::size_t>(max_size), budget, emitted);
  head.push(root);
  head.emit();
  std::vector<Animal> out = head.take();
  if (max_size == 1) return out;

  std::vector<VertexId> first;
  for (const Edge& e : g.neighbours(root)) first.push_back(e.to);
  const auto branches = static_cast<long>(first.size());
  std::vector<std::vector<Animal>> parts(first.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < branches; ++i) {
    try {
      Grower grower(g, root, static_cast<std::size_t>(max_size), budget, emitted);
      grower.mark(root);
      for (VertexId u : first) grower.mark(u);
      grower.push(root);
      grower.push(first[i]);
      grower.emit();
      if (max_size > 2) {
        std::vector<VertexId> untried(first.begin(), first.begin() + i);
        grower.extend_from(first[i], untried);
      }
      parts[i] = grower.take();
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& part : parts) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(out.begin(), out.end(), animal_less);
  return out;
}

double animal_probability(const Animal& a, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("percolation parameter must lie in (0,1)");
  return std::pow(p, static_cast<double>(a.size())) * std::pow(1.0 - p, static_cast<double>(a.boundary_size()));
}

Rational animal_probability(const Animal& a, const Rational& p) {
  if (!(sgn(p) > 0 && p < 1)) throw std::invalid_argument("percolation parameter must lie in (0,1)");
  Rational q = 1 - p;
  Rational out(1);
  for (std::size_t i = 0; i < a.size(); ++i) out *= p;
  for (std::size_t i = 0; i < a.boundary_size(); ++i) out *= q;
  return out;
}

std::vector<std::size_t> counts_by_size(std::span<const Animal> animals, int max_size) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(max_size) + 1, 0);
  for (const Animal& a : animals) {
    if (a.size() < counts.size()) ++counts[a.size()];
  }
  return counts;
}

namespace {

// smallest fixed point of q = (1-p) + p q^(d-1): a child subtree stays finite
double tree_finite_branch(double p, int degree) {
  double q = 0.0;
  for (int it = 0; it < 100000; ++it) {
    double next = (1.0 - p) + p * std::pow(q, degree - 1);
    if (std::abs(next - q) < 1e-17) {
      q = next;
      break;
    }
    q = next;
  }
  return q;
}

}  // namespace

ResidualMass residual_mass(const Graph& g, VertexId root, double p, std::span<const Animal> enumerated,
                           int max_size) {
  ResidualMass r;
  for (const Animal& a : enumerated) r.enumerated += animal_probability(a, p);

  const FamilySpec& fam = g.family();
  if (!fam.infinite() && !g.has_frontier()) {
    r.method = "exhaustive";
    if (static_cast<std::size_t>(max_size) >= g.size()) {
      r.total = r.enumerated;
      r.residual = 0.0;
      return r;
    }
    auto all = enumerate_animals(g, root, static_cast<int>(g.size()));
    for (const Animal& a : all) r.total += animal_probability(a, p);
  } else if (fam.kind == Family::line) {
    r.method = "subcritical: p_c = 1";
    r.total = p;
  } else if (fam.kind == Family::regular_tree) {
    double pc = 1.0 / (fam.a - 1);
    if (p < pc) {
      r.method = "subcritical: p_c = 1/(d-1)";
      r.total = p;
    } else {
      r.method = "tree fixed point";
      double q = tree_finite_branch(p, fam.a);
      r.total = p * std::pow(q, fam.a);
    }
  } else if (fam.kind == Family::z2) {
    if (p < z2_site_threshold) {
      r.method = "subcritical: p_c(Z^2) = 0.592746";
      r.total = p;
    } else {
      r.method = "monte carlo";
      r.exact = false;
      constexpr int radius = 48;
      Graph big = materialize(Graph::lazy(fam), g.coords(root), radius);
      auto est = finite_cluster_mass_mc(big, 0, p, radius, 20000, 0x5eed);
      r.total = est.estimate;
    }
  } else {
    throw GraphError("no total-mass rule for a truncated " + fam.str() + " graph");
  }
  r.residual = r.total - r.enumerated;
  if (r.residual < 0.0) {
    if (r.exact && r.residual < -1e-12) throw std::logic_error("enumerated animal mass exceeds the total");
    r.residual = 0.0;
  }
  return r;
}

ResidualMass residual_mass(const Graph& g, VertexId root, double p, int max_size) {
  if (g.is_lazy()) {
    if (root != 0) throw GraphError("a lazy graph is rooted at its origin");
    Graph b = materialize(g, family_origin(g.family()), max_size);
    return residual_mass(b, 0, p, max_size);
  }
  auto animals = enumerate_animals(g, root, max_size);
  return residual_mass(g, root, p, animals, max_size);
}

}  // namespace lamplighter
