#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ccge/equilibrium.hpp"
#include "ccge/household.hpp"
#include "ccge/iot_data.hpp"

namespace ccge {

/// Price elasticity of fixed capital formation used when it cannot be measured.
inline constexpr double kDefaultEta = -0.80;

/// Which unit-cost system a counterfactual runs on.
enum class SystemVariant {
  Ces,          ///< calibrated nests
  CobbDouglas,  ///< every nest elasticity 1
  Leontief,     ///< every nest gamma = 1 (elasticity 0)
};

std::string to_string(SystemVariant system);
SystemVariant system_variant_from_string(const std::string& name);

/// Rebuilds every nest in the given form, choosing alpha so that the nest
/// shares of `model` at `prices` are kept and `prices.p` stays the fixed point.
/// TFP levels of both periods are rescaled by the change in unit cost at `prices`.
EconomyModel system_variant(const EconomyModel& model, SystemVariant system, const PriceVector& prices);

struct CounterfactualConfig {
  double shock_size = 1.0;  ///< money units
  std::optional<double> eta;  ///< overrides the measured or default elasticity
  std::optional<double> next_capital;  ///< observed K2, used to measure eta
  int max_outer_iterations = 1000;
  double outer_tolerance = 1e-10;
  SolverOptions solver;
};

/// Observed t = 1 quantities held fixed or used as the reference of a counterfactual.
struct Baseline {
  Eigen::VectorXd p;  ///< solved t = 1 prices
  double r = 1.0;
  double w = 1.0;
  double price_index = 1.0;  ///< I(p1)
  double consumption = 0.0;  ///< B1
  double labor = 0.0;        ///< L1
  double capital = 0.0;      ///< K1
  double net_exports = 0.0;  ///< R1
  Eigen::VectorXd net_exports_nominal;  ///< p1 E1
  Eigen::VectorXd formation_ratios;     ///< g
  double formation_total = 0.0;         ///< sum p1 G1
  Eigen::VectorXd output_nominal;       ///< p1 Y1
  CapitalPrices capital_prices;
  double net_formation0 = 0.0;  ///< K1 - (1 - delta) K0
  double net_formation1 = 0.0;  ///< K2 - (1 - delta) K1, from the budget identity
  double eta = kDefaultEta;
  bool eta_measured = false;
};

/// Baseline from normalized tables. Throws ValidationError if a recovered capital price is not positive.
Baseline make_baseline(const EconomyModel& model, const LinkedIOTables& normalized_tables,
                       const HouseholdPreferences& prefs, const CounterfactualConfig& config = {});

struct CounterfactualOutcome {
  std::optional<std::size_t> shocked_sector;
  SystemVariant system = SystemVariant::Ces;
  Eigen::VectorXd theta;
  Eigen::VectorXd p;
  double price_index = 1.0;          ///< I(p')
  double capital_price_level = 0.0;  ///< s1' rho
  double net_formation = 0.0;        ///< K2' - (1 - delta) K1
  double next_capital = 0.0;         ///< K2'
  double formation_total = 0.0;      ///< G' total
  double consumption = 0.0;          ///< B'
  double labor = 0.0;                ///< L'
  double capital = 0.0;              ///< K1, unchanged
  double net_exports = 0.0;          ///< R1, unchanged
  double r = 1.0;
  double w = 1.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd a_L;
  Eigen::VectorXd household_nominal;
  Eigen::VectorXd formation_nominal;
  Eigen::VectorXd net_exports_nominal;
  Eigen::VectorXd output_nominal;  ///< [I - A']^-1 f'
  double benefit = 0.0;
  double cost = 0.0;
  double welfare_gain = 0.0;
  double effectiveness = 0.0;
  double leontief_residual = 0.0;  ///< ||(I - A') v' - f'|| / ||f'||
  bool converged = false;
  int iterations = 0;
  int price_iterations = 0;
};

/// theta1 with theta_k scaled by (p_k Y_k + size) / (p_k Y_k).
Eigen::VectorXd inject_shock(const Eigen::VectorXd& theta, std::size_t k, double size,
                             const Eigen::VectorXd& output_nominal);

CounterfactualOutcome solve_alternative_equilibrium(const EconomyModel& model, const HouseholdPreferences& prefs,
                                                    const Baseline& baseline, const CounterfactualConfig& config,
                                                    const Eigen::VectorXd& theta_prime);

/// Welfare gain / ((1 - beta) size).
double effectiveness(double welfare_gain, const HouseholdPreferences& prefs, double size);

struct SweepEntry {
  std::size_t sector = 0;
  SystemVariant system = SystemVariant::Ces;
  std::optional<CounterfactualOutcome> outcome;
  std::string error;
  std::size_t effectiveness_rank = 0;  ///< 1-based within the system, 0 on failure
  std::size_t stream_rank = 0;         ///< 1-based
  std::string classification;
};

struct SweepOptions {
  std::vector<SystemVariant> systems{SystemVariant::Ces, SystemVariant::CobbDouglas, SystemVariant::Leontief};
  std::vector<std::string> classification;  ///< per sector, optional
};

struct SweepResult {
  std::vector<SweepEntry> entries;  ///< by system, then sector
  std::size_t failures = 0;
};

/// Shocks every sector under every requested system. Failures are recorded per entry.
SweepResult run_shock_sweep(const EconomyModel& model, const HouseholdPreferences& prefs, const Baseline& baseline,
                            const CounterfactualConfig& config, const SweepOptions& options = {});

}  // namespace ccge
