#include <benchmark/benchmark.h>

#include "lamplighter/animals.hpp"
#include "lamplighter/lamplighter.hpp"
#include "lamplighter/percolation.hpp"

using namespace lamplighter;

namespace {

const Graph& z2_ball() {
  static const Graph g = materialize(build_graph("z2"), {0, 0}, 12);
  return g;
}

template <bool Parallel>
void enumerate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto a = Parallel ? enumerate_animals(z2_ball(), 0, k) : reference::enumerate_animals(z2_ball(), 0, k);
    benchmark::DoNotOptimize(a.data());
  }
}

template <bool Parallel>
void path_sum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto v = Parallel ? return_prob_path_sum<double>(z2_ball(), 0, 2, n)
                      : reference::return_prob_path_sum<double>(z2_ball(), 0, 2, n);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void animal_sum(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto animals = enumerate_animals(z2_ball(), 0, k);
  for (auto _ : state) {
    auto s = Parallel ? expected_return_animal_sum<double>(z2_ball(), 0, 0.5, 10, animals, 0.0)
                      : reference::expected_return_animal_sum<double>(z2_ball(), 0, 0.5, 10, animals, 0.0);
    benchmark::DoNotOptimize(s.values.data());
  }
}

template <bool Parallel>
void monte_carlo(benchmark::State& state) {
  const auto samples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? mc_expected_return(z2_ball(), 0, 0.5, 10, samples, 1)
                      : reference::mc_expected_return(z2_ball(), 0, 0.5, 10, samples, 1);
    benchmark::DoNotOptimize(r.estimate.data());
  }
}

}  // namespace

BENCHMARK(enumerate<false>)->Name("enumerate/serial")->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(enumerate<true>)->Name("enumerate/parallel")->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(path_sum<false>)->Name("path_sum/serial")->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK(path_sum<true>)->Name("path_sum/parallel")->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(animal_sum<false>)->Name("animal_sum/serial")->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(animal_sum<true>)->Name("animal_sum/parallel")->Arg(7)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(monte_carlo<false>)->Name("mc/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(monte_carlo<true>)->Name("mc/parallel")->Arg(20000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
