#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

#include "ccge/calibration.hpp"
#include "ccge/ces_core.hpp"
#include "ccge/iot_data.hpp"
#include "ccge/stream_order.hpp"

namespace ccge {

/// The system C of sector unit-cost functions.
struct EconomyModel {
  std::vector<SectorTechnology> technologies;  ///< technologies[j].sector == j
  StreamOrder order;
  int normalization_period = 1;

  std::size_t size() const { return technologies.size(); }
  Eigen::VectorXd theta(int t) const;
};

/// Throws ValidationError unless there is exactly one valid technology per sector.
void validate_model(const EconomyModel& model);

struct SolverOptions {
  double tolerance = 1e-12;    ///< entrywise relative change, and its a posteriori error bound
  int max_iterations = 10000;
  double damping = 1.0;        ///< 1 = plain successive substitution
};

/// Prices with the implied cost-share structure.
struct EquilibriumState {
  Eigen::VectorXd p;
  double r = 1.0;
  double w = 1.0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd A;  ///< A(i, j): share of input i in sector j
  Eigen::VectorXd a_K;
  Eigen::VectorXd a_L;
  int iterations = 0;
  double residual = 0.0;  ///< ||p - C(p) / theta||_inf / ||p||_inf
};

/// C_j(p, r, w) / theta_j for every sector.
Eigen::VectorXd price_map(const EconomyModel& model, const PriceVector& prices, const Eigen::VectorXd& theta);

/// Shares and fixed-point residual at given prices, without solving.
EquilibriumState evaluate_state(const EconomyModel& model, const PriceVector& prices, const Eigen::VectorXd& theta);

/// Fixed point p = C(p, r, w) <theta>^-1 by successive substitution.
EquilibriumState solve_prices(const EconomyModel& model, double r, double w, const Eigen::VectorXd& theta,
                              const std::optional<Eigen::VectorXd>& p_init = std::nullopt,
                              const SolverOptions& options = {});

/// Observed factor prices of both periods.
struct FactorPath {
  std::array<double, kPeriods> r{1.0, 1.0};
  std::array<double, kPeriods> w{1.0, 1.0};

  static FactorPath from_tables(const LinkedIOTables& tables);
};

/// Calibrates every sector on (normalized) tables.
struct EconomyCalibration {
  EconomyModel model;
  std::vector<CalibrationTrace> traces;
};

EconomyCalibration calibrate_economy(const LinkedIOTables& normalized_tables, const StreamOrder& order);

/// Solved states at both observed factor prices and TFP levels.
std::array<EquilibriumState, kPeriods> restore_structures(const EconomyModel& model, const FactorPath& factors,
                                                          const SolverOptions& options = {});

/// State at r, w, theta interpolated arithmetically with weight s on period 1.
EquilibriumState interpolated_state(const EconomyModel& model, const FactorPath& factors, double s,
                                    const SolverOptions& options = {});

struct HalfwayResult {
  EquilibriumState state;
  Eigen::VectorXd labor_intensity_growth;  ///< ln(a_L,0.5 / a_L,0)
};

HalfwayResult halfway_state(const EconomyModel& model, const FactorPath& factors, const SolverOptions& options = {});

/// ln(a_L,1 / a_L,0) per sector.
Eigen::VectorXd labor_intensity_growth(const Eigen::VectorXd& a_L0, const Eigen::VectorXd& a_L1);

}  // namespace ccge
