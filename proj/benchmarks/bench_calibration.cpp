#include <benchmark/benchmark.h>

#include "ccge/calibration.hpp"
#include "ccge/equilibrium.hpp"
#include "ccge/synthetic.hpp"

namespace {

void BM_CalibrateEconomy(benchmark::State& state) {
  const auto economy = ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(ccge::calibrate_economy(economy.tables, economy.model.order));
}
BENCHMARK(BM_CalibrateEconomy)->Arg(10)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GenerateEconomy(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ccge::generate_synthetic_economy(static_cast<std::size_t>(state.range(0)), seed++));
  }
}
BENCHMARK(BM_GenerateEconomy)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
