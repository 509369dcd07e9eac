#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ccge/equilibrium.hpp"
#include "ccge/household.hpp"
#include "ccge/iot_data.hpp"
#include "ccge/stream_order.hpp"

namespace ccge {

struct GeneratorConfig {
  double density = 0.35;          ///< probability that a permitted off-diagonal flow exists
  double max_mean_inputs = 8.0;   ///< density is capped at this many expected inputs per sector
  double self_use = 0.3;          ///< probability of a diagonal flow
  bool acyclic = true;            ///< flows only go downstream in a hidden order
  bool closure_order = false;     ///< nest order from the transitive closure of the support
  bool normalized = true;         ///< period 1 prices, r1, w1 and theta1 all equal to one
  double alpha_min = 0.05;
  double alpha_max = 0.95;
  double gamma_min = -2.0;
  double gamma_max = 0.9;
  double tfp_growth = 0.2;        ///< |ln(theta1 / theta0)| bound
  double factor_growth = 0.2;     ///< |ln(r1 / r0)|, |ln(w1 / w0)| bound
  double min_log_price_change = 1e-3;  ///< redraw when a nest's relative price barely moves
  double lambda = 1.1;            ///< household CES exponent
  double beta = kDefaultBeta;
  double delta = kDefaultDelta;
  double consumption = 100.0;     ///< B1
  double consumption_growth = 0.1;  ///< |ln(B1 / B0)| bound
  double formation_ratio = 0.25;  ///< G1 total / B1
  double export_ratio = 0.05;     ///< upper bound of p E_i / (B / N)
  double capital_price_min = 1.5; ///< s0 rho / r1 lower bound
  double capital_price_max = 3.0;
  int max_retries = 100;         ///< economy redraws, and sector redraws within one economy
};

/// A generated economy together with the values it was generated from.
struct SyntheticEconomy {
  LinkedIOTables tables;
  EconomyModel model;  ///< generating technologies, nests in `model.order`
  IncidenceMatrix support;
  std::vector<std::size_t> hidden_order;  ///< upstream first
  HouseholdPreferences preferences;
  std::array<EquilibriumState, kPeriods> states;
  std::array<double, kPeriods> capital_price_levels{};  ///< s_t rho
  double next_capital = 0.0;  ///< K2 consistent with the t = 1 budget
  Eigen::VectorXd tfp_growth;  ///< ln(theta1 / theta0)
  int attempts = 0;
};

/// Random cascaded CES economy whose tables satisfy every balance by construction.
/// Throws ConvergenceError when no acceptable draw is found within the retry limit.
SyntheticEconomy generate_synthetic_economy(std::size_t n_sectors, std::uint64_t seed,
                                            const GeneratorConfig& config = {});

}  // namespace ccge
