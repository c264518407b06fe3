#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / ("lamplighter_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  std::string cmd = std::string(LAMPLIGHTER_BIN) + " " + args + " --out " + scratch().string() + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
  std::ifstream f(scratch() / name);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

json load(const std::string& name) { return json::parse(slurp(name)); }

}  // namespace

TEST_CASE("animals on z2 and K2") {
  REQUIRE(run("animals --graph z2 --max-size 4") == 0);
  auto s = load("animals_summary.json");
  CHECK(s["counts"] == json::array({1, 4, 18, 76}));
  CHECK(s["config"]["graph"] == "z2");

  REQUIRE(run("animals --graph K2 --max-size 2") == 0);
  std::istringstream lines(slurp("animals.jsonl"));
  std::string line;
  std::getline(lines, line);
  CHECK(json::parse(line)["config"]["m"] == 2);
  int n = 0;
  while (std::getline(lines, line)) {
    auto a = json::parse(line);
    CHECK(a.contains("prob_num"));
    ++n;
  }
  CHECK(n == 2);
  CHECK(run("animals --graph K2 --max-size 0") == 2);
}

TEST_CASE("moments by every method on K2") {
  for (const char* method : {"config-space", "path-sum", "animal-sum"}) {
    REQUIRE(run(std::string("moments --graph K2 --n-max 4 --mode rational --method ") + method) == 0);
    auto r = load(std::string("moments_") + method + ".json");
    std::vector<std::string> got;
    for (const auto& e : r["results"]) got.push_back(std::to_string(e["value_num"].get<long>()) + "/" +
                                                     std::to_string(e["value_den"].get<long>()));
    CHECK(got == std::vector<std::string>{"1/1", "0/1", "1/4", "0/1", "1/4"});
  }
  REQUIRE(run("moments --graph K2 --n-max 4 --method mc --seed 7") == 0);
  const std::string first = slurp("moments_mc.json");
  auto r = json::parse(first);
  for (int n : {2, 4}) {
    const auto& e = r["results"][n];
    CHECK(std::abs(e["estimate"].get<double>() - 0.25) <= 3 * e["stderr"].get<double>());
    CHECK(e["seed"] == 7);
  }
  REQUIRE(run("moments --graph K2 --n-max 4 --method mc --seed 7") == 0);
  CHECK(slurp("moments_mc.json") == first);
}

TEST_CASE("spectrum writes measure and cdf") {
  REQUIRE(run("spectrum --graph K2 --p 1/2") == 0);
  const std::string measure = slurp("spectrum_measure.csv");
  CHECK(measure.find("# residual: 0") != std::string::npos);
  CHECK(measure.find("location,mass\n") != std::string::npos);
  CHECK(measure.find("\n0,0.75\n") != std::string::npos);
  CHECK(slurp("spectrum_cdf.csv").find("location,cumulative_mass\n") != std::string::npos);
  CHECK(run("spectrum --graph K2 --p 0") == 2);
  CHECK(run("spectrum --graph K2 --p 1") == 2);
}

TEST_CASE("eigenbasis output") {
  REQUIRE(run("eigenbasis --graph P3 --max-size 2") == 0);
  auto e = load("eigenbasis.json");
  CHECK(e["summary"]["verdict"] == "pass");
  const auto& first = e["eigenfunctions"][0];
  CHECK(first.contains("lambda"));
  CHECK(first["vector"][0].contains("walker"));
  CHECK(first["residual"].get<double>() <= 1e-10);
}

TEST_CASE("verify suites and exit codes") {
  CHECK(run("verify theorem1 --graph P3 --n-max 6") == 0);
  CHECK(load("verify_theorem1.json")["verdict"] == "pass");
  CHECK(run("verify theorem1 --graph P3 --n-max 6 --m 2 --p 1/3") == 1);
  CHECK(load("verify_theorem1.json")["warnings"].size() == 1);
  CHECK(run("verify intertwine --graph P3 --max-size 3") == 0);
  CHECK(run("verify completeness-probe --max-size 12") == 0);
  CHECK(load("verify_completeness-probe.json")["verdict"] == "report-only");
  CHECK(run("verify no-such-suite") == 2);
  CHECK(run("animals --graph hexagon") == 2);
  CHECK(run("moments --graph z2 --n-max 12") == 3);
}

TEST_CASE("output directory from the environment") {
  const fs::path d = scratch() / "env";
  const std::string cmd = "LAMPLIGHTER_OUT=" + d.string() + " " + LAMPLIGHTER_BIN + " animals --graph K2 --max-size 2 >/dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(d / "animals.jsonl"));
}
