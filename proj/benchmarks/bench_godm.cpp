#include <random>

#include <benchmark/benchmark.h>

#include <godm/admm.hpp>
#include <godm/confidence.hpp>
#include <godm/dynamics.hpp>
#include <godm/greedy.hpp>
#include <godm/ingest.hpp>

using namespace godm;

namespace {

// Mean out-degree around 10, matching sparse trust networks.
SignedDigraph graph_of(std::size_t n) {
  return gen_synthetic({n, 10.0 / double(n), 0.2, WeightDistribution::Uniform, 42});
}

std::vector<double> opinions(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> s(n);
  for (auto& v : s) v = d(rng);
  return s;
}

void BM_ConfidenceAdjusted(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(confidence_adjusted(g, 0.5));
}

void BM_SolverSetup(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  const GodmSystem sys(g, confidence_adjusted(g, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(EquilibriumSolver(sys));
}

void BM_SolveKrylov(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  const GodmSystem sys(g, confidence_adjusted(g, 0.5));
  const EquilibriumSolver solver(sys);
  const auto s = opinions(g.node_count());
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(s));
}

void BM_SolveIterative(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  const GodmSystem sys(g, confidence_fixed(g.node_count(), 0.5));
  const auto s = opinions(g.node_count());
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_iterative(sys, s, 1e-10));
}

void BM_ContributionIndex(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  const GodmSystem sys(g, confidence_adjusted(g, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(contribution_index(sys));
}

void BM_Greedy(benchmark::State& state) {
  const std::size_t n = state.range(0);
  const auto g = opinions(n);
  const auto s = opinions(n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_allocate(g, std::span(s).first(n), n / 10.0));
}

void BM_AdmmBudget(benchmark::State& state) {
  const auto g = graph_of(state.range(0));
  const GodmSystem sys(g, confidence_adjusted(g, 0.5));
  const auto gi = contribution_index(sys);
  const auto s = opinions(g.node_count());
  AdmmOptions opts{1.0, 1e-9, 1e-9, 1000000, false};
  for (auto _ : state) {
    benchmark::DoNotOptimize(admm_solve_budget(gi, s, g.node_count() / 10.0, Objective::Maximize, opts));
  }
}

}  // namespace

BENCHMARK(BM_ConfidenceAdjusted)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolverSetup)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveKrylov)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveIterative)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ContributionIndex)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Greedy)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AdmmBudget)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
