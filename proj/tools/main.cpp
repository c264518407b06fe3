#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lamplighter/animals.hpp"
#include "lamplighter/eigenbasis.hpp"
#include "lamplighter/lamplighter.hpp"
#include "lamplighter/percolation.hpp"
#include "lamplighter/spectral.hpp"
#include "lamplighter/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lamplighter;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_budget = 3;
constexpr int exit_other = 4;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  std::string graph;
  std::optional<std::string> root;
  int m = 2;
  std::optional<std::string> p_text;
  int n_max = 10;
  int max_size = 4;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::string mode = "float";
  std::string out;
  std::string method = "config-space";
  std::string suite;
  double merge_tol = default_merge_tolerance;

  bool graph_given = false;
  bool m_given = false;
  bool max_size_given = false;

  Probability p;

  json to_json() const {
    json j{{"command", command}, {"graph", graph}, {"m", m}, {"n_max", n_max},
           {"max_size", max_size}, {"samples", samples}, {"seed", seed}, {"mode", mode}};
    j["root"] = root ? json(*root) : json(nullptr);
    j["p"] = p.value;
    j["p_exact"] = p.exact ? json(to_string(*p.exact)) : json(nullptr);
    if (command == "moments") j["method"] = method;
    if (command == "spectrum") j["merge_tol"] = merge_tol;
    if (command == "verify") j["suite"] = suite;
    return j;
  }
};

std::string out_dir(const RunConfig& c) {
  std::string dir = c.out;
  if (dir.empty()) {
    const char* env = std::getenv("LAMPLIGHTER_OUT");
    dir = env && *env ? env : ".";
  }
  fs::create_directories(dir);
  return dir;
}

void write_file(const RunConfig& c, const std::string& name, const std::string& text) {
  const fs::path path = fs::path(out_dir(c)) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// integers that fit go out as numbers, larger ones as decimal strings
json big_int(const mpz_class& z) {
  if (z.fits_slong_p()) return z.get_si();
  return z.get_str();
}

void validate(RunConfig& c) {
  if (c.m < 2 || c.m > 255) throw UsageError("--m must lie in [2, 255]");
  if (c.n_max < 0) throw UsageError("--n-max must be nonnegative");
  if (c.max_size < 1) throw UsageError("--max-size must be at least 1");
  if (c.samples < 1) throw UsageError("--samples must be at least 1");
  if (c.merge_tol < 0.0) throw UsageError("--merge-tol must be nonnegative");
  if (c.p_text) {
    try {
      c.p = Probability::parse(*c.p_text);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--p: ") + e.what());
    }
    if (!(c.p.value > 0.0 && c.p.value < 1.0)) throw UsageError("--p must lie strictly between 0 and 1");
  } else {
    c.p = Probability::from_rational(Rational(1, c.m));
  }
  if (c.command != "verify" && c.graph.empty()) throw UsageError("--graph is required");
}

GraphCase target(const RunConfig& c, int radius) { return make_case(c.graph, c.root, radius, false); }

json animal_json(const Graph& g, const Animal& a) {
  json v = json::array(), b = json::array();
  for (VertexId x : a.vertices) v.push_back(g.name(x));
  for (VertexId x : a.boundary) b.push_back(g.name(x));
  return {{"vertices", v}, {"boundary", b}, {"size", a.size()}, {"bsize", a.boundary_size()}};
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_animals(const RunConfig& c) {
  const GraphCase t = target(c, c.max_size);
  const auto animals = enumerate_animals(t.graph, t.root, c.max_size);
  const auto res = residual_mass(t.graph, t.root, c.p.value, animals, c.max_size);

  std::string text = json{{"config", c.to_json()}}.dump() + "\n";
  for (const Animal& a : animals) {
    json j = animal_json(t.graph, a);
    j["prob"] = animal_probability(a, c.p.value);
    if (c.p.exact) {
      const Rational q = animal_probability(a, *c.p.exact);
      j["prob_num"] = big_int(q.get_num());
      j["prob_den"] = big_int(q.get_den());
    }
    text += j.dump() + "\n";
  }
  write_file(c, "animals.jsonl", text);

  const auto counts = counts_by_size(animals, c.max_size);
  json summary{{"config", c.to_json()},
               {"counts", std::vector<std::size_t>(counts.begin() + 1, counts.end())},
               {"total", animals.size()},
               {"residual", res.residual},
               {"enumerated_mass", res.enumerated},
               {"total_mass", res.total},
               {"residual_exact", res.exact},
               {"residual_method", res.method}};
  write_file(c, "animals_summary.json", summary.dump(2) + "\n");
  print(summary);
  return exit_ok;
}

json moment_entry(const RunConfig& c, int n, double value, const std::optional<Rational>& exact, double bound) {
  json j{{"method", c.method}, {"n", n}, {"m", c.m}, {"value", value}};
  j["value_num"] = exact ? big_int(exact->get_num()) : json(nullptr);
  j["value_den"] = exact ? big_int(exact->get_den()) : json(nullptr);
  j["error_bound"] = bound;
  return j;
}

int cmd_moments(const RunConfig& c) {
  const bool rational = c.mode == "rational";
  json results = json::array();
  json extra = json::object();

  auto emit_rational = [&](const std::vector<Rational>& v, double bound) {
    for (std::size_t n = 0; n < v.size(); ++n)
      results.push_back(moment_entry(c, static_cast<int>(n), to_double(v[n]), v[n], bound));
  };
  auto emit_double = [&](const std::vector<double>& v, double bound) {
    for (std::size_t n = 0; n < v.size(); ++n)
      results.push_back(moment_entry(c, static_cast<int>(n), v[n], std::nullopt, bound));
  };

  if (c.method == "config-space" || c.method == "path-sum") {
    const GraphCase t = target(c, c.n_max / 2);
    const bool cs = c.method == "config-space";
    if (rational) {
      emit_rational(cs ? return_prob_config_space<Rational>(t.graph, t.root, c.m, c.n_max)
                       : return_prob_path_sum<Rational>(t.graph, t.root, c.m, c.n_max),
                    0.0);
    } else {
      emit_double(cs ? return_prob_config_space<double>(t.graph, t.root, c.m, c.n_max)
                     : return_prob_path_sum<double>(t.graph, t.root, c.m, c.n_max),
                  0.0);
    }
  } else if (c.method == "animal-sum") {
    const GraphCase t = target(c, c.max_size);
    const auto animals = enumerate_animals(t.graph, t.root, c.max_size);
    const auto res = residual_mass(t.graph, t.root, c.p.value, animals, c.max_size);
    if (rational) {
      auto s = expected_return_animal_sum<Rational>(t.graph, t.root, c.p.rational(), c.n_max, animals, res.residual);
      emit_rational(s.values, s.error_bound);
    } else {
      auto s = expected_return_animal_sum<double>(t.graph, t.root, c.p.value, c.n_max, animals, res.residual);
      emit_double(s.values, s.error_bound);
    }
    extra = {{"animals", animals.size()}, {"residual_exact", res.exact}, {"residual_method", res.method}};
  } else {
    const GraphCase t = target(c, c.n_max / 2);
    const auto r = mc_expected_return(t.graph, t.root, c.p.value, c.n_max, c.samples, c.seed);
    for (int n = 0; n <= c.n_max; ++n) {
      const auto u = static_cast<std::size_t>(n);
      results.push_back({{"estimate", r.estimate[u]},
                         {"stderr", r.standard_error[u]},
                         {"samples", r.samples},
                         {"capped", r.capped},
                         {"seed", r.seed},
                         {"p", r.p},
                         {"n", n}});
    }
  }

  json report{{"config", c.to_json()}, {"method", c.method}, {"results", results}};
  if (!extra.empty()) report["detail"] = extra;
  write_file(c, "moments_" + c.method + ".json", report.dump(2) + "\n");
  print(report);
  return exit_ok;
}

int cmd_spectrum(const RunConfig& c) {
  const GraphCase t = target(c, c.max_size);
  const auto animals = enumerate_animals(t.graph, t.root, c.max_size);
  const auto res = residual_mass(t.graph, t.root, c.p.value, animals, c.max_size);
  const AtomicMeasure mu = mixture_measure(t.graph, t.root, c.p.value, animals, res.residual, c.merge_tol);

  std::string header = "# config: " + c.to_json().dump() + "\n";
  header += "# p: " + num(c.p.value) + "\n";
  header += "# root: " + t.graph.name(t.root) + "\n";
  header += "# max_size: " + std::to_string(c.max_size) + "\n";
  header += "# residual: " + num(mu.residual) + "\n";

  std::string measure = header + "location,mass\n";
  for (const Atom& a : mu.atoms) measure += num(a.location) + "," + num(a.mass) + "\n";
  std::string cdf = header + "location,cumulative_mass\n";
  for (const Atom& a : cumulative(mu)) cdf += num(a.location) + "," + num(a.mass) + "\n";
  write_file(c, "spectrum_measure.csv", measure);
  write_file(c, "spectrum_cdf.csv", cdf);

  print({{"config", c.to_json()},
         {"atoms", mu.atoms.size()},
         {"animals", animals.size()},
         {"total_mass", mu.total_mass()},
         {"residual", mu.residual},
         {"residual_exact", res.exact}});
  return exit_ok;
}

int cmd_eigenbasis(const RunConfig& c) {
  const GraphCase t = target(c, c.max_size);
  const Graph& g = t.graph;
  const LamplighterOperator op(WalkKernel(g), c.m);
  const auto animals = enumerate_animals(g, t.root, c.max_size);

  json list = json::array();
  std::vector<Eigenfunction> all;
  double worst = 0.0;
  for (const Animal& a : animals) {
    const auto window = ProjectionSpec::of(a, c.m).sites();
    for (Eigenfunction& e : build_eigenfunctions(a, op.kernel(), c.m, window)) {
      const double r = verify_eigen(e, op);
      worst = std::max(worst, r);
      json vec = json::array();
      for (const LampEntry& en : e.vector.entries()) {
        json cfg = json::object();
        for (auto [site, lamp] : en.key.config.lit()) cfg[g.name(site)] = lamp;
        vec.push_back({{"config", cfg}, {"walker", g.name(en.key.walker)}, {"re", en.amp.real()}, {"im", en.amp.imag()}});
      }
      list.push_back({{"animal", animal_json(g, a)}, {"lambda", e.lambda}, {"vector", vec}, {"residual", r}});
      all.push_back(std::move(e));
    }
  }
  const double gram = gram_deviation(all, op.reversible_weights());
  const bool ok = worst <= 1e-10 && gram <= 1e-10;
  json summary{{"animals", animals.size()},
               {"eigenfunctions", all.size()},
               {"max_residual", worst},
               {"gram_deviation", gram},
               {"verdict", ok ? "pass" : "fail"}};
  write_file(c, "eigenbasis.json",
             json{{"config", c.to_json()}, {"summary", summary}, {"eigenfunctions", list}}.dump(2) + "\n");
  print({{"config", c.to_json()}, {"summary", summary}});
  return ok ? exit_ok : exit_verify_failed;
}

std::vector<GraphCase> verify_cases(const RunConfig& c, const std::vector<std::string>& defaults, int radius,
                                    bool closed) {
  std::vector<GraphCase> cases;
  if (c.graph_given) {
    cases.push_back(make_case(c.graph, c.root, radius, closed));
  } else {
    for (const std::string& spec : defaults) cases.push_back(make_case(spec, std::nullopt, radius, closed));
  }
  return cases;
}

int cmd_verify(const RunConfig& c) {
  SuiteReport rep;
  json warnings = json::array();
  if (c.suite == "theorem1") {
    if (c.p_text && c.p.rational() != Rational(1, c.m)) {
      const std::string w = "p = " + *c.p_text + " differs from 1/m; the three routes agree only at p = 1/m";
      std::cerr << "warning: " << w << "\n";
      warnings.push_back(w);
    }
    const auto cases = verify_cases(c, {"K2", "P3", "cycle:4", "grid:3x3"}, c.n_max / 2, true);
    const std::vector<int> ms = c.m_given ? std::vector<int>{c.m} : std::vector<int>{2, 3};
    std::optional<Rational> p;
    if (c.p_text) p = c.p.rational();
    rep = verify_theorem1(cases, ms, c.n_max, p);
  } else if (c.suite == "intertwine") {
    const int k = c.max_size_given ? c.max_size : 3;
    rep = verify_intertwine(verify_cases(c, {"K2", "P3"}, k + 1, false), c.m, k);
  } else if (c.suite == "lemma-orthogonality") {
    const int k = c.max_size;
    rep = verify_lemma_orthogonality(verify_cases(c, {"K2", "P3", "cycle:4", "cycle:5"}, k + 1, false), c.m, k);
  } else if (c.suite == "completeness-probe") {
    const int k = c.max_size_given ? c.max_size : 20;
    rep = verify_completeness(verify_cases(c, {"line"}, k, false), c.m, k);
  } else {
    const int k = c.max_size;
    std::vector<GraphCase> cases;
    if (c.graph_given) {
      cases.push_back(make_case(c.graph, c.root, k, false));
    } else {
      cases.push_back(make_case("P3", std::nullopt, 0, true));
      cases.push_back(make_case("cycle:4", std::nullopt, 0, true));
      cases.push_back(make_case("z2", std::nullopt, 2, true));
    }
    rep = verify_eigenbasis(cases, c.m, k);
  }
  json out = rep.to_json();
  out["config"] = c.to_json();
  if (!warnings.empty()) out["warnings"] = warnings;
  write_file(c, "verify_" + c.suite + ".json", out.dump(2) + "\n");
  print(out);
  return rep.passed() ? exit_ok : exit_verify_failed;
}

void add_common(CLI::App* sub, RunConfig& c, bool graph_required) {
  auto* g = sub->add_option("--graph", c.graph, "line | cycle:<n> | grid:<w>x<h> | z2 | tree:<d> | explicit:<file> | K2 | P3");
  if (graph_required) g->required();
  sub->add_option("--root", c.root, "root vertex label or coordinates (default: first vertex / origin)");
  sub->add_option("--m", c.m, "lamp states per vertex")->capture_default_str();
  sub->add_option("--p", c.p_text, "site percolation parameter, decimal or fraction (default 1/m)");
  sub->add_option("--n-max", c.n_max, "largest walk length")->capture_default_str();
  sub->add_option("--max-size", c.max_size, "largest animal size")->capture_default_str();
  sub->add_option("--samples", c.samples, "Monte Carlo samples")->capture_default_str();
  sub->add_option("--seed", c.seed, "Monte Carlo seed")->capture_default_str();
  sub->add_option("--mode", c.mode, "arithmetic")->check(CLI::IsMember({"float", "rational"}))->capture_default_str();
  sub->add_option("--out", c.out, "output directory (default $LAMPLIGHTER_OUT or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and eigenbases of switch-walk-switch lamplighter walks"};
  app.require_subcommand(1);
  RunConfig c;

  auto* animals = app.add_subcommand("animals", "enumerate lattice animals at the root");
  add_common(animals, c, true);
  auto* moments = app.add_subcommand("moments", "return probabilities for n = 0..n_max");
  add_common(moments, c, true);
  moments->add_option("--method", c.method)
      ->check(CLI::IsMember({"config-space", "path-sum", "animal-sum", "mc"}))
      ->capture_default_str();
  auto* spectrum = app.add_subcommand("spectrum", "atomic spectral measure as CSV");
  add_common(spectrum, c, true);
  spectrum->add_option("--merge-tol", c.merge_tol, "atom merge tolerance")->capture_default_str();
  auto* eigen = app.add_subcommand("eigenbasis", "finitely supported eigenfunctions");
  add_common(eigen, c, true);
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, c, false);
  verify->add_option("suite", c.suite)
      ->required()
      ->check(CLI::IsMember({"theorem1", "intertwine", "lemma-orthogonality", "completeness-probe", "eigenbasis"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  c.graph_given = sub->count("--graph") > 0;
  c.m_given = sub->count("--m") > 0;
  c.max_size_given = sub->count("--max-size") > 0;

  try {
    validate(c);
    if (c.command == "animals") return cmd_animals(c);
    if (c.command == "moments") return cmd_moments(c);
    if (c.command == "spectrum") return cmd_spectrum(c);
    if (c.command == "eigenbasis") return cmd_eigenbasis(c);
    return cmd_verify(c);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return exit_budget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_other;
  }
}
