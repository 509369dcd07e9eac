#include <benchmark/benchmark.h>

#include "ccge/equilibrium.hpp"
#include "ccge/synthetic.hpp"

namespace {

void BM_SolvePrices(benchmark::State& state) {
  const auto economy = ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), 3);
  const Eigen::VectorXd theta = economy.model.theta(0);
  int iterations = 0;
  for (auto _ : state) {
    const auto solved = ccge::solve_prices(economy.model, 1.0, 1.0, theta);
    iterations = solved.iterations;
    benchmark::DoNotOptimize(solved.p.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_SolvePrices)->Arg(10)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_RestoreStructures(benchmark::State& state) {
  const auto economy = ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), 3);
  const auto factors = ccge::FactorPath::from_tables(economy.tables);
  for (auto _ : state) benchmark::DoNotOptimize(ccge::restore_structures(economy.model, factors));
}
BENCHMARK(BM_RestoreStructures)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
