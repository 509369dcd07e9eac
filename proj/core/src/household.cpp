#include "ccge/household.hpp"

#include <cmath>
#include <limits>

#include "ccge/ces_core.hpp"
#include "ccge/errors.hpp"

namespace ccge {

void validate_preferences(const HouseholdPreferences& prefs) {
  if (prefs.mu.size() == 0) throw ValidationError("preferences have no commodities");
  if (!(prefs.mu.array() >= 0.0).all()) throw ValidationError("share weights must be non-negative");
  if (std::abs(prefs.mu.sum() - 1.0) > 1e-9) throw ValidationError("share weights must sum to one");
  if (!(prefs.beta > 0.0 && prefs.beta < 1.0)) throw ValidationError("discount factor must lie in (0, 1)");
  if (!(prefs.delta >= 0.0 && prefs.delta <= 1.0)) throw ValidationError("depreciation must lie in [0, 1]");
  if (!std::isfinite(prefs.lambda)) throw ValidationError("lambda must be finite");
}

double price_index(const Eigen::VectorXd& p, const HouseholdPreferences& prefs) {
  if (p.size() != prefs.mu.size()) throw ValidationError("price vector does not match preferences");
  if (!(p.array() > 0.0).all()) throw ValidationError("price index requires strictly positive prices");
  const Eigen::ArrayXd log_p = p.array().log();
  if (std::abs(prefs.lambda) < kCobbDouglasThreshold) return std::exp((prefs.mu.array() * log_p).sum());
  // Scaled by the largest term so that large |lambda| cannot overflow.
  const Eigen::ArrayXd scaled = prefs.lambda * log_p;
  const double top = scaled.maxCoeff();
  const double sum = (prefs.mu.array() * (scaled - top).exp()).sum();
  return std::exp((top + std::log(sum)) / prefs.lambda);
}

Eigen::VectorXd expenditure_shares(const Eigen::VectorXd& p, const HouseholdPreferences& prefs) {
  const double index = price_index(p, prefs);
  if (std::abs(prefs.lambda) < kCobbDouglasThreshold) return prefs.mu;
  return (prefs.mu.array() * (prefs.lambda * (p.array() / index).log()).exp()).matrix();
}

double indirect_utility(const Eigen::VectorXd& p, double budget, const HouseholdPreferences& prefs) {
  return budget / price_index(p, prefs);
}

Eigen::VectorXd budget_shares(const PeriodTable& period) {
  const Eigen::VectorXd spend = period.price.cwiseProduct(period.household);
  const double total = spend.sum();
  if (!(total > 0.0)) throw ValidationError("household consumption total must be positive");
  return spend / total;
}

HouseholdPreferences preferences_from_tables(const LinkedIOTables& normalized_tables, double lambda, double beta,
                                             double delta) {
  HouseholdPreferences prefs;
  const auto& t1 = normalized_tables[1];
  prefs.mu = budget_shares(t1);
  if (std::abs(lambda) >= kCobbDouglasThreshold) {
    prefs.mu = prefs.mu.cwiseProduct((-lambda * t1.price.array().log()).exp().matrix());
    prefs.mu /= prefs.mu.sum();
  }
  prefs.lambda = lambda;
  prefs.beta = beta;
  prefs.delta = delta;
  validate_preferences(prefs);
  return prefs;
}

namespace {

struct LeastSquares {
  Eigen::VectorXd coef;
  Eigen::VectorXd residual;
  double ssr = 0.0;
};

LeastSquares fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const char* what) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < x.cols()) throw ValidationError(std::string("rank-deficient design in ") + what);
  LeastSquares out;
  out.coef = qr.solve(y);
  out.residual = y - x * out.coef;
  out.ssr = out.residual.squaredNorm();
  return out;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

EstimationReport estimate_lambda(const ExpenditurePanel& panel) {
  const auto n = panel.b0.size();
  if (panel.b1.size() != n || panel.p0.size() != n || panel.p1.size() != n || panel.instrument.size() != n) {
    throw ValidationError("expenditure panel columns differ in length");
  }
  if (n < 3) throw ValidationError("lambda estimation needs at least three commodities");
  if (!(panel.b0.array() > 0.0).all() || !(panel.b1.array() > 0.0).all()) {
    throw ValidationError("budget shares must be positive in both periods");
  }

  EstimationReport report;
  report.observations = static_cast<std::size_t>(n);
  report.weights = (panel.b1.array().square().inverse() + panel.b0.array().square().inverse()).sqrt().matrix();
  const Eigen::VectorXd scale = report.weights.cwiseInverse();

  const Eigen::VectorXd dlb = (panel.b1.array() / panel.b0.array()).log().matrix();
  const Eigen::VectorXd dlp = (panel.p1.array() / panel.p0.array()).log().matrix();

  const Eigen::VectorXd y = scale.cwiseProduct(dlb);
  Eigen::MatrixXd x(n, 2);
  x.col(0) = scale;
  x.col(1) = scale.cwiseProduct(dlp);
  Eigen::MatrixXd z(n, 3);
  z.col(0) = scale;
  z.col(1) = scale.cwiseProduct(panel.instrument);
  z.col(2) = scale.cwiseProduct(panel.instrument.array().exp().matrix());

  const double dof = static_cast<double>(n);
  const auto ols = fit(x, y, "OLS regression");
  report.ols_intercept = ols.coef(0);
  report.ols_lambda = ols.coef(1);

  const auto first = fit(z, x.col(1), "first stage");
  const auto first_restricted = fit(z.leftCols(1), x.col(1), "first stage");
  report.first_stage_df2 = static_cast<int>(n - 3);
  report.first_stage_f = n > 3 ? ((first_restricted.ssr - first.ssr) / 2.0) / (first.ssr / (dof - 3.0)) : nan();

  Eigen::MatrixXd x_hat = x;
  x_hat.col(1) = x.col(1) - first.residual;
  const auto second = fit(x_hat, y, "second stage");
  const Eigen::VectorXd coef = second.coef;
  const Eigen::VectorXd u = y - x * coef;
  report.intercept = coef(0);
  report.lambda_hat = coef(1);
  if (n > 2) {
    const double sigma2 = u.squaredNorm() / (dof - 2.0);
    const Eigen::MatrixXd cov = sigma2 * (x_hat.transpose() * x_hat).inverse();
    report.intercept_se = std::sqrt(cov(0, 0));
    report.lambda_se = std::sqrt(cov(1, 1));
  }

  // Control-function form of the Durbin and Wu-Hausman endogeneity tests.
  if (n > 3) {
    Eigen::MatrixXd augmented(n, 3);
    augmented << x, first.residual;
    const double ssr_u = fit(augmented, y, "endogeneity test").ssr;
    const double ssr_r = ols.ssr;
    report.durbin_chi2 = ssr_r > 0.0 ? dof * (ssr_r - ssr_u) / ssr_r : 0.0;
    report.wu_hausman_f = ssr_u > 0.0 ? (dof - 3.0) * (ssr_r - ssr_u) / ssr_u : 0.0;

    const double uu = u.squaredNorm();
    if (uu > 0.0) {
      const double rss = fit(z, u, "overidentification test").ssr;
      const double r2 = 1.0 - rss / uu;
      report.sargan_chi2 = dof * r2;
      report.basmann_chi2 = (dof - 3.0) * r2 / (1.0 - r2);
    }
  } else {
    report.durbin_chi2 = report.wu_hausman_f = report.sargan_chi2 = report.basmann_chi2 = nan();
  }
  if (!(report.first_stage_f >= 10.0)) report.warnings.emplace_back("weak instruments: first-stage F below 10");
  return report;
}

AggregateAccounts aggregate_accounts(const LinkedIOTables& tables) {
  AggregateAccounts accounts;
  for (int t = 0; t < kPeriods; ++t) {
    const auto& pt = tables[t];
    auto& agg = accounts.period[static_cast<std::size_t>(t)];
    agg.consumption = pt.price.dot(pt.household);
    agg.net_exports = pt.price.dot(pt.net_exports);
    agg.capital_formation = pt.price.dot(pt.capital_formation);
    agg.labor = pt.labor.sum();
    agg.capital = pt.capital.sum();
    agg.r = pt.capital_price;
    agg.w = pt.wage;
  }
  return accounts;
}

CapitalPrices recover_capital_prices(const AggregateAccounts& accounts, const HouseholdPreferences& prefs,
                                     double index0, double index1) {
  const auto& a0 = accounts.period[0];
  const auto& a1 = accounts.period[1];
  const double net_formation = a1.capital - (1.0 - prefs.delta) * a0.capital;
  if (std::abs(net_formation) < 1e-300) throw ValidationError("zero net capital formation between periods");
  if (!(prefs.delta < 1.0)) throw ValidationError("Euler condition needs depreciation below one");

  CapitalPrices out;
  out.s_rho[0] = (a0.r * a0.capital + a0.w * a0.labor - a0.consumption - a0.net_exports) / net_formation;
  out.s_rho[1] = ((index1 / index0) * out.s_rho[0] / prefs.beta - a1.r) / (1.0 - prefs.delta);
  out.negative = !(out.s_rho[0] > 0.0) || !(out.s_rho[1] > 0.0);
  return out;
}

}  // namespace ccge
