#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ccge/ces_core.hpp"
#include "ccge/iot_data.hpp"
#include "ccge/stream_order.hpp"

namespace ccge {

/// Largest gamma accepted from a two-point fit; larger estimates are clamped and flagged.
inline constexpr double kMaxCalibratedGamma = 0.999999;
/// |x1 - x0| (or |ln z1 - ln z0|) below this counts as no variation.
inline constexpr double kIdentificationTolerance = 1e-12;

/// Exact two-point fit of ln z_t = ln zeta + gamma x_t.
struct TwoPointFit {
  NestParams params;
  double log_zeta = 0.0;
  std::array<double, kPeriods> residual{};
  bool cobb_douglas_fallback = false;  ///< no variation in either z or x
  bool clamped = false;                ///< gamma estimate was >= 1
};

/// z0, z1: cost-share ratios a_n / sum_{i<n} a_i; x0, x1: ln(p_n / pi_n).
TwoPointFit two_point_nest_params(double z0, double z1, double x0, double x1, std::size_t input = kCapitalInput);

/// Per-nest state of a calibration.
struct NestTrace {
  std::size_t input = kCapitalInput;
  std::array<double, kPeriods> pi{};        ///< compound price entering the nest
  std::array<double, kPeriods> z{};         ///< observed share ratio
  std::array<double, kPeriods> x{};         ///< ln(p_n / pi_n)
  std::array<double, kPeriods> residual{};  ///< regression residual
};

struct CalibrationTrace {
  std::vector<NestTrace> nests;
  std::array<double, kPeriods> unit_cost{};  ///< Pi_t
  bool flagged = false;
  std::vector<std::string> diagnostics;
};

struct SectorCalibration {
  SectorTechnology technology;
  CalibrationTrace trace;
};

/// Prices of both periods as PriceVector, taken from (normalized) tables.
std::array<PriceVector, kPeriods> period_prices(const LinkedIOTables& tables);

/// Restoring parameters for sector j: nest 0 compounds K with L, later nests
/// add used intermediates in stream order. theta_t = Pi_t / p_jt.
SectorCalibration calibrate_sector(const CostShareTable& shares, const std::array<PriceVector, kPeriods>& prices,
                                   const StreamOrder& order, std::size_t j);

/// Cost-share panel of one sector over T+1 periods, nest inputs already ordered.
struct SharePanel {
  std::vector<double> wage;            ///< w_t
  std::vector<double> labor_share;     ///< a_L,t
  std::vector<std::size_t> inputs;     ///< nest inputs, inputs[0] = kCapitalInput
  std::vector<std::vector<double>> input_price;  ///< [n][t]; n = 0 is r
  std::vector<std::vector<double>> input_share;  ///< [n][t]; n = 0 is a_K
};

struct StagewiseFit {
  std::vector<NestParams> nests;
  std::vector<double> sum_squared_residuals;  ///< per nest
  std::vector<std::vector<double>> state;      ///< pi[n][t]
};

/// Forward stagewise OLS: fits each nest conditional on the current state, then advances it.
StagewiseFit stagewise_ols_params(const SharePanel& panel);

struct TfpRecord {
  std::vector<double> tfpg_cces;
  std::vector<double> tfpg_tornqvist;
  std::vector<double> theta0;
  std::vector<double> theta1;
};

/// ln(Pi_1 / Pi_0) - ln(p_j1 / p_j0).
double tfp_growth(const SectorTechnology& tech, const std::array<PriceVector, kPeriods>& prices);

/// Log Tornqvist TFP growth from shares and prices of both periods.
double tornqvist_tfpg(const CostShareTable& shares, const std::array<PriceVector, kPeriods>& prices, std::size_t j);

}  // namespace ccge
