#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccge/calibration.hpp"
#include "ccge/equilibrium.hpp"
#include "ccge/errors.hpp"
#include "ccge/synthetic.hpp"
#include "oracles.hpp"

using namespace ccge;
using ccge::testing::cobb_douglas_exponents;
using ccge::testing::cobb_douglas_generator;
using ccge::testing::cobb_douglas_prices;
using ccge::testing::direct_unit_cost;
using ccge::testing::max_relative_error;
using ccge::testing::position_prices;

namespace {

SectorTechnology sector(std::size_t j, std::vector<NestParams> nests, double theta = 1.0) {
  SectorTechnology tech;
  tech.sector = j;
  tech.nests = std::move(nests);
  tech.theta0 = tech.theta1 = theta;
  return tech;
}

EconomyModel two_sector_cobb_douglas() {
  EconomyModel model;
  model.technologies.push_back(sector(0, {NestParams::make(0.4, 0.0, kCapitalInput)}));
  model.technologies.push_back(sector(1, {NestParams::make(0.3, 0.0, kCapitalInput), NestParams::make(0.2, 0.0, 0)}));
  model.order.permutation = {0, 1};
  return model;
}

}  // namespace

TEST(SolvePrices, SingleSectorAtUnitPricesIsOne) {
  EconomyModel model;
  model.technologies.push_back(sector(0, {NestParams::make(0.35, -0.4, kCapitalInput)}));
  model.order.permutation = {0};
  const auto state = solve_prices(model, 1.0, 1.0, Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(state.p(0), 1.0, 1e-15);
  EXPECT_NEAR(state.a_K(0), 0.35, 1e-15);
}

TEST(SolvePrices, TwoSectorCobbDouglasClosedForm) {
  const auto model = two_sector_cobb_douglas();
  const double r = 1.3, w = 0.8;
  const Eigen::Vector2d theta(1.1, 0.9);
  const auto state = solve_prices(model, r, w, theta);
  const double p0 = std::pow(r, 0.4) * std::pow(w, 0.6) / 1.1;
  const double p1 = std::pow(std::pow(r, 0.3) * std::pow(w, 0.7), 0.8) * std::pow(p0, 0.2) / 0.9;
  EXPECT_NEAR(state.p(0), p0, 1e-12);
  EXPECT_NEAR(state.p(1), p1, 1e-12);
  EXPECT_NEAR(state.A(0, 1), 0.2, 1e-12);
  EXPECT_NEAR(state.a_K(1), 0.8 * 0.3, 1e-12);
}

TEST(SolvePrices, CobbDouglasEconomiesMatchLogLinearSolution) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto economy = generate_synthetic_economy(15, seed, cobb_douglas_generator());
    const auto& model = economy.model;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Eigen::VectorXd theta(15);
    for (auto& x : theta) x = u(rng);
    const double r = u(rng), w = u(rng);
    const auto state = solve_prices(model, r, w, theta);
    EXPECT_LT(max_relative_error(state.p, cobb_douglas_prices(model, r, w, theta)), 1e-11) << seed;
  }
}

TEST(SolvePrices, UniformTfpScalingFollowsLeontiefMultiplier) {
  // Factor prices held fixed: ln p' = ln p - ln c (I - E')^-1 1.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto economy = generate_synthetic_economy(12, seed, cobb_douglas_generator());
    const auto& model = economy.model;
    const Eigen::VectorXd theta = model.theta(1);
    const double c = 2.0;
    const auto base = solve_prices(model, 1.0, 1.0, theta);
    const auto scaled = solve_prices(model, 1.0, 1.0, c * theta);
    const Eigen::MatrixXd e = cobb_douglas_exponents(model);
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(12, 12) - e.transpose();
    const Eigen::VectorXd multiplier = lhs.fullPivLu().solve(Eigen::VectorXd::Ones(12));
    const Eigen::VectorXd expected = (base.p.array().log() - std::log(c) * multiplier.array()).exp();
    EXPECT_LT(max_relative_error(scaled.p, expected), 1e-11);
  }
}

TEST(SolvePrices, TfpScalingWithoutIntermediatesDividesPrices) {
  GeneratorConfig config;
  config.density = 0.0;
  config.self_use = 0.0;
  const auto economy = generate_synthetic_economy(8, 3, config);
  const Eigen::VectorXd theta = economy.model.theta(0);
  const auto base = solve_prices(economy.model, 1.2, 0.9, theta);
  const auto scaled = solve_prices(economy.model, 1.2, 0.9, 2.0 * theta);
  EXPECT_LT(max_relative_error(scaled.p, base.p / 2.0), 1e-13);
}

TEST(SolvePrices, FixedPointSatisfiesNestByNestCost) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto economy = generate_synthetic_economy(20, seed);
    const auto& model = economy.model;
    const auto state = solve_prices(model, 1.1, 0.95, model.theta(0));
    const PriceVector prices{state.p, 1.1, 0.95};
    for (std::size_t j = 0; j < 20; ++j) {
      const auto& tech = model.technologies[j];
      const double cost = direct_unit_cost(position_prices(prices, tech), tech);
      EXPECT_NEAR(cost / tech.theta0, state.p(static_cast<Eigen::Index>(j)), 1e-11 * cost);
    }
    EXPECT_LT(state.residual, 1e-12);
  }
}

TEST(SolvePrices, SharesSumToOne) {
  const auto economy = generate_synthetic_economy(20, 7);
  const auto state = solve_prices(economy.model, 1.0, 1.0, economy.model.theta(1));
  const Eigen::VectorXd total = state.A.colwise().sum().transpose() + state.a_K + state.a_L;
  EXPECT_LT((total.array() - 1.0).abs().maxCoeff(), 1e-14);
}

TEST(SolvePrices, UniqueAcrossRandomStarts) {
  const auto economy = generate_synthetic_economy(15, 11);
  const auto& model = economy.model;
  const Eigen::VectorXd theta = model.theta(0);
  const auto reference = solve_prices(model, 1.0, 1.0, theta);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(std::log(0.1), std::log(10.0));
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd start(15);
    for (auto& x : start) x = std::exp(u(rng));
    const auto state = solve_prices(model, 1.0, 1.0, theta, start);
    EXPECT_LT(max_relative_error(state.p, reference.p), 1e-10);
  }
  const auto doubled = solve_prices(model, 1.0, 1.0, theta, Eigen::VectorXd(2.0 * reference.p));
  EXPECT_LT(max_relative_error(doubled.p, reference.p), 1e-10);
}

TEST(SolvePrices, DampingReachesTheSamePoint) {
  const auto economy = generate_synthetic_economy(10, 2);
  SolverOptions options;
  options.damping = 0.5;
  const auto plain = solve_prices(economy.model, 1.0, 1.0, economy.model.theta(0));
  const auto damped = solve_prices(economy.model, 1.0, 1.0, economy.model.theta(0), std::nullopt, options);
  EXPECT_LT(max_relative_error(damped.p, plain.p), 1e-10);
}

TEST(SolvePrices, IterationLimitRaisesConvergenceError) {
  const auto economy = generate_synthetic_economy(10, 2);
  SolverOptions options;
  options.max_iterations = 2;
  try {
    solve_prices(economy.model, 1.0, 1.0, economy.model.theta(0), std::nullopt, options);
    FAIL() << "expected a convergence error";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
    EXPECT_GT(e.residual(), options.tolerance);
  }
}

TEST(SolvePrices, RejectsNonPositiveInputs) {
  const auto model = two_sector_cobb_douglas();
  EXPECT_THROW(solve_prices(model, 0.0, 1.0, Eigen::VectorXd::Ones(2)), ValidationError);
  EXPECT_THROW(solve_prices(model, 1.0, 1.0, Eigen::Vector2d(1.0, -1.0)), ValidationError);
  EXPECT_THROW(solve_prices(model, 1.0, 1.0, Eigen::VectorXd::Ones(3)), ValidationError);
}

TEST(RestoreStructures, ReproducesObservedTables) {
  for (std::size_t n : {1, 5, 25}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto economy = generate_synthetic_economy(n, seed);
      const auto calibration = calibrate_economy(economy.tables, economy.model.order);
      const auto shares = compute_cost_shares(economy.tables);
      const auto states = restore_structures(calibration.model, FactorPath::from_tables(economy.tables));
      for (std::size_t t = 0; t < kPeriods; ++t) {
        const auto& observed = economy.tables[static_cast<int>(t)];
        EXPECT_LT(max_relative_error(states[t].p, observed.price), 1e-9) << n << " " << seed << " " << t;
        EXPECT_LT((states[t].A - shares.a[t]).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((states[t].a_K - shares.a_K[t]).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((states[t].a_L - shares.a_L[t]).cwiseAbs().maxCoeff(), 1e-9);
      }
      EXPECT_LT((states[1].p.array() - 1.0).abs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Halfway, EndpointsAreTheRestoredPeriods) {
  const auto economy = generate_synthetic_economy(10, 4);
  const auto factors = FactorPath::from_tables(economy.tables);
  const auto states = restore_structures(economy.model, factors);
  EXPECT_LT(max_relative_error(interpolated_state(economy.model, factors, 0.0).p, states[0].p), 1e-12);
  EXPECT_LT(max_relative_error(interpolated_state(economy.model, factors, 1.0).p, states[1].p), 1e-12);
  EXPECT_THROW(interpolated_state(economy.model, factors, 1.5), ValidationError);
}

TEST(Halfway, StationaryEconomyHasNoGrowth) {
  auto economy = generate_synthetic_economy(6, 8);
  for (auto& tech : economy.model.technologies) tech.theta0 = tech.theta1;
  const FactorPath factors{{1.0, 1.0}, {1.0, 1.0}};
  const auto half = halfway_state(economy.model, factors);
  EXPECT_LT(half.labor_intensity_growth.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Halfway, FullPathGrowthMatchesTables) {
  const auto economy = generate_synthetic_economy(10, 6);
  const auto shares = compute_cost_shares(economy.tables);
  const auto states = restore_structures(economy.model, FactorPath::from_tables(economy.tables));
  const Eigen::VectorXd expected = (shares.a_L[1].array() / shares.a_L[0].array()).log();
  EXPECT_LT((labor_intensity_growth(states[0].a_L, states[1].a_L) - expected).cwiseAbs().maxCoeff(), 1e-9);
  const auto half = halfway_state(economy.model, FactorPath::from_tables(economy.tables));
  EXPECT_TRUE(half.labor_intensity_growth.allFinite());
}
