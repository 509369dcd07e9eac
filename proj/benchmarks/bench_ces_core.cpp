#include <benchmark/benchmark.h>

#include <random>

#include "ccge/ces_core.hpp"

namespace {

struct Cascade {
  ccge::SectorTechnology tech;
  ccge::PriceVector prices;
};

Cascade make_cascade(std::size_t inputs) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> alpha(0.1, 0.9), gamma(-2.0, 0.9), price(0.5, 2.0);
  Cascade c;
  c.tech.nests.push_back(ccge::NestParams::make(alpha(rng), gamma(rng), ccge::kCapitalInput));
  for (std::size_t i = 0; i < inputs; ++i) c.tech.nests.push_back(ccge::NestParams::make(alpha(rng), gamma(rng), i));
  c.prices.p.resize(static_cast<Eigen::Index>(inputs));
  for (auto& p : c.prices.p) p = price(rng);
  return c;
}

void BM_CascadedUnitCost(benchmark::State& state) {
  const auto c = make_cascade(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ccge::cascaded_unit_cost(c.prices, c.tech));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CascadedUnitCost)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_CostShareGradient(benchmark::State& state) {
  const auto c = make_cascade(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ccge::cost_share_gradient(c.prices, c.tech));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CostShareGradient)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_ElasticityTables(benchmark::State& state) {
  const auto c = make_cascade(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ccge::elasticity_tables(c.tech, c.prices));
}
BENCHMARK(BM_ElasticityTables)->Arg(3)->Arg(10)->Arg(30);

}  // namespace
