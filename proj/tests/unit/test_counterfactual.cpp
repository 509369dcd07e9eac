#include <gtest/gtest.h>

#include <cmath>

#include "ccge/counterfactual.hpp"
#include "ccge/errors.hpp"
#include "ccge/synthetic.hpp"
#include "oracles.hpp"

using namespace ccge;
using ccge::testing::cobb_douglas_generator;
using ccge::testing::cobb_douglas_prices;
using ccge::testing::max_relative_error;

namespace {

struct Setup {
  SyntheticEconomy economy;
  Baseline baseline;
};

Setup setup(std::size_t n, std::uint64_t seed, const GeneratorConfig& config = {}) {
  Setup s{generate_synthetic_economy(n, seed, config), {}};
  s.baseline = make_baseline(s.economy.model, s.economy.tables, s.economy.preferences);
  return s;
}

CounterfactualOutcome shock(const Setup& s, std::size_t k, double size, const EconomyModel* model = nullptr) {
  const auto& m = model ? *model : s.economy.model;
  CounterfactualConfig config;
  config.shock_size = size;
  return solve_alternative_equilibrium(m, s.economy.preferences, s.baseline, config,
                                       inject_shock(m.theta(1), k, size, s.baseline.output_nominal));
}

}  // namespace

TEST(InjectShock, Examples) {
  const Eigen::Vector3d theta(1.0, 0.8, 1.2), output(10.0, 20.0, 5.0);
  EXPECT_EQ(inject_shock(theta, 1, 0.0, output), theta);
  const auto doubled = inject_shock(theta, 1, 20.0, output);
  EXPECT_DOUBLE_EQ(doubled(1), 1.6);
  EXPECT_EQ(doubled(0), 1.0);
  EXPECT_EQ(doubled(2), 1.2);
  const auto marginal = inject_shock(theta, 2, 1e-6, output);
  EXPECT_NEAR(marginal(2) / theta(2) - 1.0, 1e-6 / 5.0, 1e-15);
  EXPECT_THROW(inject_shock(theta, 3, 1.0, output), ValidationError);
  EXPECT_THROW(inject_shock(theta, 0, 1.0, Eigen::Vector3d(0.0, 1.0, 1.0)), ValidationError);
}

TEST(Effectiveness, DiscountedPresentValue) {
  HouseholdPreferences h;
  EXPECT_EQ(effectiveness(0.0, h, 1.0), 0.0);
  EXPECT_NEAR(effectiveness(1.0, h, 1.0), 1.0 / (1.0 - std::pow(1.03, -5.0)), 1e-12);
  EXPECT_NEAR(effectiveness(2.5, h, 2.5), 7.27849, 1e-5);
}

TEST(Counterfactual, ZeroShockReproducesBaseline) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = setup(10, seed);
    const auto out = shock(s, 3, 0.0);
    EXPECT_LT(max_relative_error(out.p, s.baseline.p), 1e-12);
    EXPECT_NEAR(out.consumption, s.baseline.consumption, 1e-9 * s.baseline.consumption);
    EXPECT_NEAR(out.labor, s.baseline.labor, 1e-9 * s.baseline.labor);
    EXPECT_LT(std::abs(out.welfare_gain), 1e-9 * s.baseline.consumption);
    EXPECT_NEAR(out.capital_price_level, s.baseline.capital_prices.s_rho[1], 1e-12);
    // The restored baseline reproduces the observed t = 1 output.
    EXPECT_LT(max_relative_error(out.output_nominal, s.baseline.output_nominal), 1e-9);
  }
}

TEST(Counterfactual, FixedQuantitiesAreUnchanged) {
  const auto s = setup(10, 2);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto out = shock(s, k, 1.0);
    EXPECT_EQ(out.r, s.baseline.r);
    EXPECT_EQ(out.w, s.baseline.w);
    EXPECT_EQ(out.capital, s.baseline.capital);
    EXPECT_EQ(out.net_exports, s.baseline.net_exports);
    EXPECT_EQ(out.net_exports_nominal, s.baseline.net_exports_nominal);
  }
}

TEST(Counterfactual, LaborSatisfiesLeontiefSystem) {
  const auto s = setup(12, 5);
  const auto out = shock(s, 4, 1.0);
  EXPECT_LT(out.leontief_residual, 1e-10);
  const Eigen::VectorXd f = out.household_nominal + out.formation_nominal + out.net_exports_nominal;
  const Eigen::VectorXd v = (Eigen::MatrixXd::Identity(12, 12) - out.A).fullPivLu().solve(f);
  EXPECT_NEAR(out.labor, out.a_L.dot(v) / out.w, 1e-10 * out.labor);
  // Budget: B' + G' + R = r K + w L'.
  EXPECT_NEAR(out.consumption + out.formation_total + out.net_exports, out.r * out.capital + out.w * out.labor,
              1e-10 * out.consumption);
  EXPECT_NEAR(out.household_nominal.sum(), out.consumption, 1e-10 * out.consumption);
}

TEST(Counterfactual, SingleSectorClosedForm) {
  GeneratorConfig config;
  config.self_use = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = setup(1, seed, config);
    const auto& b = s.baseline;
    const auto& h = s.economy.preferences;
    const auto& tech = s.economy.model.technologies[0];
    const double size = 2.0;
    const auto out = shock(s, 0, size);

    const double theta = tech.theta1 * (b.output_nominal(0) + size) / b.output_nominal(0);
    const auto& nest = tech.nests[0];
    const double unit_cost = std::pow(nest.alpha * std::pow(b.r, nest.gamma) + (1 - nest.alpha) * std::pow(b.w, nest.gamma),
                                      1.0 / nest.gamma);
    const double p = unit_cost / theta;
    const double a_L = (1 - nest.alpha) * std::pow(b.w, nest.gamma) / std::pow(unit_cost, nest.gamma);
    const double s_rho1 = b.capital_prices.s_rho[1];
    const double s_rho = ((p / b.p(0)) * (s_rho1 * (1 - h.delta) + b.r) - b.r) / (1 - h.delta);
    const double net = b.net_formation1 + b.eta * (s_rho - s_rho1) * b.net_formation0 / b.capital_prices.s_rho[0];
    const double m = a_L / b.w;
    const double labor = m * b.r * b.capital / (1.0 - m * b.w);
    const double consumption = b.r * b.capital - s_rho * net - b.net_exports + b.w * labor;
    const double gain = (consumption / p - b.consumption / b.p(0)) * b.p(0) - b.w * (labor - b.labor);

    EXPECT_NEAR(out.p(0), p, 1e-12 * p);
    EXPECT_NEAR(out.labor, labor, 1e-9 * labor);
    EXPECT_NEAR(out.consumption, consumption, 1e-9 * consumption);
    EXPECT_NEAR(out.welfare_gain, gain, 1e-8 * b.consumption);
  }
}

TEST(Counterfactual, UniformCobbDouglasScalingMatchesLogLinearPrices) {
  const auto s = setup(10, 3, cobb_douglas_generator());
  const Eigen::VectorXd theta = 1.5 * s.economy.model.theta(1);
  CounterfactualConfig config;
  const auto out = solve_alternative_equilibrium(s.economy.model, s.economy.preferences, s.baseline, config, theta);
  EXPECT_LT(max_relative_error(out.p, cobb_douglas_prices(s.economy.model, s.baseline.r, s.baseline.w, theta)), 1e-11);
}

TEST(Counterfactual, WelfareIsContinuousInShockSize) {
  const auto s = setup(10, 4);
  double previous_ratio = 0.0, previous_step = 0.0;
  double size = 4.0;
  for (int k = 0; k < 8; ++k, size /= 2.0) {
    const auto out = shock(s, 6, size);
    const double ratio = out.welfare_gain / size;
    EXPECT_TRUE(std::isfinite(ratio));
    if (k > 0) {
      const double step = std::abs(ratio - previous_ratio);
      if (k > 1) EXPECT_LT(step, 0.75 * previous_step + 1e-9);
      previous_step = step;
    }
    previous_ratio = ratio;
  }
}

TEST(Baseline, MeasuredEtaFollowsElasticityDefinition) {
  const auto economy = generate_synthetic_economy(8, 1);
  CounterfactualConfig config;
  config.next_capital = economy.next_capital * 1.05;
  const auto b = make_baseline(economy.model, economy.tables, economy.preferences, config);
  const double n1 = *config.next_capital - (1.0 - economy.preferences.delta) * b.capital;
  const double s0 = b.capital_prices.s_rho[0], s1 = b.capital_prices.s_rho[1];
  EXPECT_TRUE(b.eta_measured);
  EXPECT_NEAR(b.eta, ((n1 - b.net_formation0) / b.net_formation0) / ((s1 - s0) / s0), 1e-12);
  config.eta = -0.5;
  EXPECT_EQ(make_baseline(economy.model, economy.tables, economy.preferences, config).eta, -0.5);
  EXPECT_EQ(make_baseline(economy.model, economy.tables, economy.preferences).eta, kDefaultEta);
}

TEST(SystemVariant, KeepsBaselineFixedPointAndShares) {
  const auto s = setup(10, 6);
  const PriceVector reference{s.baseline.p, s.baseline.r, s.baseline.w};
  const auto ces = evaluate_state(s.economy.model, reference, s.economy.model.theta(1));
  for (auto system : {SystemVariant::CobbDouglas, SystemVariant::Leontief}) {
    const auto variant = system_variant(s.economy.model, system, reference);
    const auto state = evaluate_state(variant, reference, variant.theta(1));
    EXPECT_LT(state.residual, 1e-12) << to_string(system);
    EXPECT_LT((state.A - ces.A).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((state.a_L - ces.a_L).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SystemVariant, Names) {
  for (auto system : {SystemVariant::Ces, SystemVariant::CobbDouglas, SystemVariant::Leontief}) {
    EXPECT_EQ(system_variant_from_string(to_string(system)), system);
  }
  EXPECT_THROW(system_variant_from_string("translog"), ValidationError);
}

TEST(ShockSweep, SingleSector) {
  GeneratorConfig config;
  config.self_use = 0.0;
  const auto s = setup(1, 2, config);
  const auto result = run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {});
  ASSERT_EQ(result.entries.size(), 3u);
  for (const auto& entry : result.entries) {
    EXPECT_EQ(entry.effectiveness_rank, 1u);
    EXPECT_EQ(entry.stream_rank, 1u);
  }
}

TEST(ShockSweep, FiniteAndDeterministic) {
  const auto s = setup(10, 8);
  const auto a = run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {});
  const auto b = run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {});
  EXPECT_EQ(a.failures, 0u);
  ASSERT_EQ(a.entries.size(), 30u);
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    ASSERT_TRUE(a.entries[i].outcome.has_value());
    EXPECT_TRUE(std::isfinite(a.entries[i].outcome->effectiveness));
    EXPECT_EQ(a.entries[i].outcome->effectiveness, b.entries[i].outcome->effectiveness);
    EXPECT_EQ(a.entries[i].effectiveness_rank, b.entries[i].effectiveness_rank);
  }
}

TEST(ShockSweep, RanksAreDescendingEffectiveness) {
  const auto s = setup(10, 9);
  const auto result = run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {});
  for (const auto& x : result.entries) {
    for (const auto& y : result.entries) {
      if (x.system != y.system || x.effectiveness_rank >= y.effectiveness_rank) continue;
      EXPECT_GE(x.outcome->effectiveness, y.outcome->effectiveness);
    }
  }
}

TEST(ShockSweep, CobbDouglasEconomyMatchesItsVariant) {
  const auto s = setup(8, 3, cobb_douglas_generator());
  SweepOptions options;
  options.systems = {SystemVariant::Ces, SystemVariant::CobbDouglas};
  const auto result = run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {}, options);
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& ces = *result.entries[k].outcome;
    const auto& cd = *result.entries[8 + k].outcome;
    EXPECT_NEAR(ces.welfare_gain, cd.welfare_gain, 1e-9 * s.baseline.consumption);
    EXPECT_LT(max_relative_error(ces.p, cd.p), 1e-12);
  }
}

TEST(ShockSweep, ClassificationMustCoverEverySector) {
  const auto s = setup(3, 1);
  SweepOptions options;
  options.classification = {"primary"};
  EXPECT_THROW(run_shock_sweep(s.economy.model, s.economy.preferences, s.baseline, {}, options), ValidationError);
}
