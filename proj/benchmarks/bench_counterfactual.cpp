#include <benchmark/benchmark.h>

#include "ccge/counterfactual.hpp"
#include "ccge/synthetic.hpp"

namespace {

void BM_ShockSweep(benchmark::State& state) {
  const auto economy = ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), 1);
  const auto baseline = ccge::make_baseline(economy.model, economy.tables, economy.preferences);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ccge::run_shock_sweep(economy.model, economy.preferences, baseline, {}));
  }
}
BENCHMARK(BM_ShockSweep)->Arg(10)->Arg(25)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_AlternativeEquilibrium(benchmark::State& state) {
  const auto economy = ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), 1);
  const auto baseline = ccge::make_baseline(economy.model, economy.tables, economy.preferences);
  const auto theta = ccge::inject_shock(economy.model.theta(1), 0, 1.0, baseline.output_nominal);
  const ccge::CounterfactualConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ccge::solve_alternative_equilibrium(economy.model, economy.preferences, baseline, config, theta));
  }
}
BENCHMARK(BM_AlternativeEquilibrium)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
