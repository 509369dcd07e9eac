#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ccge/iot_data.hpp"

namespace ccge {

/// Five-year time preference factor (3% per year).
inline const double kDefaultBeta = std::pow(1.03, -5.0);
/// Five-year capital depreciation rate (12.5% per year).
inline const double kDefaultDelta = 1.0 - std::pow(1.0 - 0.125, 5.0);
/// Substitution parameter used when no estimate is available.
inline constexpr double kDefaultLambda = 1.09631;

/// Representative household with CES utility (elasticity 1 - lambda).
struct HouseholdPreferences {
  Eigen::VectorXd mu;  ///< share weights, sum to 1
  double lambda = kDefaultLambda;
  double beta = kDefaultBeta;
  double delta = kDefaultDelta;
};

void validate_preferences(const HouseholdPreferences& prefs);

/// Cost-of-living index (sum mu_i p_i^lambda)^(1/lambda).
double price_index(const Eigen::VectorXd& p, const HouseholdPreferences& prefs);

/// b_i = mu_i (p_i / I(p))^lambda.
Eigen::VectorXd expenditure_shares(const Eigen::VectorXd& p, const HouseholdPreferences& prefs);

/// V = B / I(p).
double indirect_utility(const Eigen::VectorXd& p, double budget, const HouseholdPreferences& prefs);

/// Share weights inverted from period-1 budget shares, mu_i ~ b_i1 p_i1^-lambda;
/// with prices normalized at t = 1 this is mu = b_1.
HouseholdPreferences preferences_from_tables(const LinkedIOTables& normalized_tables, double lambda,
                                             double beta = kDefaultBeta, double delta = kDefaultDelta);

/// Observed budget shares p_i H_i / B per period.
Eigen::VectorXd budget_shares(const PeriodTable& period);

/// Inputs of the share-change regression.
struct ExpenditurePanel {
  Eigen::VectorXd b0, b1;  ///< budget shares
  Eigen::VectorXd p0, p1;  ///< prices
  Eigen::VectorXd instrument;  ///< Delta ln theta per commodity
};

struct EstimationReport {
  std::size_t observations = 0;
  double lambda_hat = 0.0;
  double lambda_se = 0.0;
  double intercept = 0.0;
  double intercept_se = 0.0;
  double ols_lambda = 0.0;
  double ols_intercept = 0.0;
  double first_stage_f = 0.0;
  int first_stage_df1 = 2;
  int first_stage_df2 = 0;
  double durbin_chi2 = 0.0;
  double wu_hausman_f = 0.0;
  double sargan_chi2 = 0.0;
  double basmann_chi2 = 0.0;
  Eigen::VectorXd weights;  ///< m_i
  std::vector<std::string> warnings;
};

/// Weighted 2SLS of Delta ln b on Delta ln p with intercept, rows scaled by 1/m_i,
/// instruments {1, Delta ln theta, exp(Delta ln theta)}.
EstimationReport estimate_lambda(const ExpenditurePanel& panel);

/// Economy-wide aggregates of one period.
struct PeriodAggregates {
  double consumption = 0.0;        ///< B = sum p H
  double net_exports = 0.0;        ///< R = sum p E
  double capital_formation = 0.0;  ///< sum p G
  double labor = 0.0;              ///< sum L
  double capital = 0.0;            ///< sum K
  double r = 1.0;
  double w = 1.0;
};

struct AggregateAccounts {
  std::array<PeriodAggregates, kPeriods> period;
};

AggregateAccounts aggregate_accounts(const LinkedIOTables& tables);

/// Capital-formation price levels s_t * rho.
struct CapitalPrices {
  std::array<double, kPeriods> s_rho{};
  bool negative = false;  ///< a recovered level is not positive
};

/// s0 rho from the t = 0 budget identity, s1 rho from the Euler condition.
CapitalPrices recover_capital_prices(const AggregateAccounts& accounts, const HouseholdPreferences& prefs,
                                     double index0, double index1);

}  // namespace ccge
