// Serial reference against the OpenMP path for the data-parallel sweeps.
#include <benchmark/benchmark.h>

#include <memory>

#include "tracemob/boundary.hpp"
#include "tracemob/harmonic.hpp"
#include "tracemob/parallel.hpp"

using namespace tracemob;

namespace {

GraphPtr pentagon() {
  static const GraphPtr g = std::make_shared<const IndependenceGraph>(
      IndependenceGraph({"a1", "a2", "a3", "a4", "a5"},
                        {{"a1", "a3"}, {"a3", "a5"}, {"a5", "a2"}, {"a2", "a4"}, {"a4", "a1"}}));
  return g;
}

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::parallel : Execution::serial; }

void BM_Enumerate(benchmark::State& state) {
  const auto& g = *pentagon();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto traces = state.range(1) ? enumerate_by_height_parallel(g, n) : enumerate_by_height(g, n);
    benchmark::DoNotOptimize(traces.data());
  }
}
BENCHMARK(BM_Enumerate)->ArgsProduct({{5, 6}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_IsHarmonic(benchmark::State& state) {
  const auto f = uniform_valuation(pentagon());
  CylinderCombination<double> phi;
  phi.terms = {{1.0, parse_trace(f.graph(), "a1")}, {-0.5, parse_trace(f.graph(), "a2 a4")}};
  const auto lambda = from_boundary(f, phi);
  for (auto _ : state) {
    auto r = is_harmonic(f, lambda, static_cast<std::size_t>(state.range(0)), mode(state));
    benchmark::DoNotOptimize(r.max_abs_laplace);
  }
}
BENCHMARK(BM_IsHarmonic)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Sample(benchmark::State& state) {
  const auto chain = build_chain(uniform_valuation(pentagon()));
  for (auto _ : state) {
    auto samples = sample_prefixes(chain, 8, static_cast<std::size_t>(state.range(0)), 1, mode(state));
    benchmark::DoNotOptimize(samples.data());
  }
}
BENCHMARK(BM_Sample)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Poisson(benchmark::State& state) {
  const auto f = uniform_valuation(pentagon());
  CylinderCombination<double> phi;
  phi.terms = {{1.0, parse_trace(f.graph(), "a1 a3")}};
  for (auto _ : state) {
    auto r = poisson_roundtrip(f, phi, static_cast<std::size_t>(state.range(0)), mode(state));
    benchmark::DoNotOptimize(r.max_deviation);
  }
}
BENCHMARK(BM_Poisson)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
