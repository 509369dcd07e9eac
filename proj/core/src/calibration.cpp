#include "ccge/calibration.hpp"

#include <cmath>
#include <sstream>

#include "ccge/errors.hpp"

namespace ccge {

namespace {

double logistic(double log_odds) {
  return log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds)) : std::exp(log_odds) / (1.0 + std::exp(log_odds));
}

std::string sector_tag(std::size_t j) { return "sector " + std::to_string(j + 1) + ": "; }

}  // namespace

TwoPointFit two_point_nest_params(double z0, double z1, double x0, double x1, std::size_t input) {
  if (!(z0 > 0.0) || !(z1 > 0.0)) throw ValidationError("two-point fit requires positive share ratios");
  const double lz0 = std::log(z0);
  const double lz1 = std::log(z1);
  const double dx = x1 - x0;
  const double dz = lz1 - lz0;

  TwoPointFit fit;
  double gamma = 0.0;
  if (std::abs(dx) < kIdentificationTolerance) {
    if (std::abs(dz) >= kIdentificationTolerance) {
      throw ValidationError("unidentified nest: share ratio changes while the price ratio does not");
    }
    fit.cobb_douglas_fallback = true;
    fit.log_zeta = lz1;
  } else {
    gamma = dz / dx;
    fit.log_zeta = (lz0 * x1 - lz1 * x0) / dx;
    if (gamma >= 1.0) {
      fit.clamped = true;
      gamma = kMaxCalibratedGamma;
      fit.log_zeta = lz1 - gamma * x1;
    }
  }
  fit.params = NestParams::make(logistic(fit.log_zeta), gamma, input);
  if (fit.cobb_douglas_fallback) fit.params.form = NestForm::CobbDouglasLimit;
  fit.residual[0] = lz0 - fit.log_zeta - gamma * x0;
  fit.residual[1] = lz1 - fit.log_zeta - gamma * x1;
  return fit;
}

std::array<PriceVector, kPeriods> period_prices(const LinkedIOTables& tables) {
  std::array<PriceVector, kPeriods> prices;
  for (int t = 0; t < kPeriods; ++t) {
    prices[static_cast<std::size_t>(t)] = {tables[t].price, tables[t].capital_price, tables[t].wage};
  }
  return prices;
}

SectorCalibration calibrate_sector(const CostShareTable& shares, const std::array<PriceVector, kPeriods>& prices,
                                   const StreamOrder& order, std::size_t j) {
  const auto n = shares.n_sectors();
  if (j >= n) throw ValidationError("sector index out of range");
  const auto jj = static_cast<Eigen::Index>(j);

  SectorCalibration out;
  out.technology.sector = j;
  auto& trace = out.trace;

  std::array<double, kPeriods> cumulative{};
  std::array<double, kPeriods> pi{};
  for (std::size_t t = 0; t < kPeriods; ++t) {
    cumulative[t] = shares.a_L[t](jj);
    pi[t] = prices[t].w;
    if (!(cumulative[t] > 0.0)) throw ValidationError(sector_tag(j) + "labor share must be positive");
  }

  auto add_nest = [&](std::size_t input, const std::array<double, kPeriods>& share) {
    NestTrace nt;
    nt.input = input;
    nt.pi = pi;
    NestParams params;
    for (std::size_t t = 0; t < kPeriods; ++t) {
      if (!(cumulative[t] > 0.0)) throw ValidationError(sector_tag(j) + "non-positive cumulative share");
      nt.z[t] = share[t] / cumulative[t];
      nt.x[t] = std::log(prices[t].input_price(input) / pi[t]);
    }
    if (share[0] == 0.0 && share[1] == 0.0) {
      // Only capital may be absent here; zero-flow intermediates never get a nest.
      params = {0.0, 0.0, input, NestForm::CobbDouglasLimit};
    } else {
      if (!(share[0] > 0.0) || !(share[1] > 0.0)) {
        throw ValidationError(sector_tag(j) + "input " + (input == kCapitalInput ? std::string("K") : std::to_string(input + 1)) +
                              " is used in only one period");
      }
      TwoPointFit fit;
      try {
        fit = two_point_nest_params(nt.z[0], nt.z[1], nt.x[0], nt.x[1], input);
      } catch (const ValidationError& e) {
        throw ValidationError(sector_tag(j) + "nest " + std::to_string(trace.nests.size()) + ": " + e.what());
      }
      params = fit.params;
      nt.residual = fit.residual;
      if (fit.clamped) {
        trace.flagged = true;
        std::ostringstream os;
        os << "nest " << trace.nests.size() << ": gamma estimate >= 1 clamped to " << kMaxCalibratedGamma;
        trace.diagnostics.push_back(os.str());
      }
      if (fit.cobb_douglas_fallback) {
        trace.diagnostics.push_back("nest " + std::to_string(trace.nests.size()) +
                                    ": no price or share variation, Cobb-Douglas fallback");
      }
    }
    for (std::size_t t = 0; t < kPeriods; ++t) {
      pi[t] = nest_unit_cost(prices[t].input_price(input), pi[t], params);
      cumulative[t] += share[t];
    }
    out.technology.nests.push_back(params);
    trace.nests.push_back(nt);
  };

  add_nest(kCapitalInput, {shares.a_K[0](jj), shares.a_K[1](jj)});
  for (const auto i : order.permutation) {
    const auto ii = static_cast<Eigen::Index>(i);
    const std::array<double, kPeriods> share{shares.a[0](ii, jj), shares.a[1](ii, jj)};
    if (share[0] == 0.0 && share[1] == 0.0) continue;
    add_nest(i, share);
  }

  trace.unit_cost = pi;
  out.technology.theta0 = pi[0] / prices[0].p(jj);
  out.technology.theta1 = pi[1] / prices[1].p(jj);
  return out;
}

StagewiseFit stagewise_ols_params(const SharePanel& panel) {
  const std::size_t periods = panel.wage.size();
  const std::size_t nests = panel.inputs.size();
  if (periods < 2) throw ValidationError("stagewise estimation needs at least two periods");
  if (panel.labor_share.size() != periods || panel.input_price.size() != nests || panel.input_share.size() != nests) {
    throw ValidationError("share panel dimensions are inconsistent");
  }

  StagewiseFit fit;
  std::vector<double> pi = panel.wage;
  std::vector<double> cumulative = panel.labor_share;
  for (std::size_t n = 0; n < nests; ++n) {
    const auto& price = panel.input_price[n];
    const auto& share = panel.input_share[n];
    if (price.size() != periods || share.size() != periods) throw ValidationError("share panel dimensions are inconsistent");
    fit.state.push_back(pi);

    bool absent = true;
    for (double s : share) absent = absent && s == 0.0;
    NestParams params;
    double ssr = 0.0;
    if (absent) {
      params = {0.0, 0.0, panel.inputs[n], NestForm::CobbDouglasLimit};
    } else {
      std::vector<double> x(periods), y(periods);
      for (std::size_t t = 0; t < periods; ++t) {
        if (!(share[t] > 0.0) || !(cumulative[t] > 0.0)) {
          throw ValidationError("nest " + std::to_string(n) + ": non-positive share in the panel");
        }
        x[t] = std::log(price[t] / pi[t]);
        y[t] = std::log(share[t] / cumulative[t]);
      }
      if (periods == 2) {
        params = two_point_nest_params(share[0] / cumulative[0], share[1] / cumulative[1], x[0], x[1], panel.inputs[n]).params;
      } else {
        double mx = 0.0, my = 0.0;
        for (std::size_t t = 0; t < periods; ++t) {
          mx += x[t];
          my += y[t];
        }
        mx /= static_cast<double>(periods);
        my /= static_cast<double>(periods);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t t = 0; t < periods; ++t) {
          sxx += (x[t] - mx) * (x[t] - mx);
          sxy += (x[t] - mx) * (y[t] - my);
        }
        if (sxx < kIdentificationTolerance * kIdentificationTolerance * static_cast<double>(periods)) {
          throw ValidationError("nest " + std::to_string(n) + ": degenerate regressor variance");
        }
        double gamma = sxy / sxx;
        if (gamma >= 1.0) gamma = kMaxCalibratedGamma;
        const double log_zeta = my - gamma * mx;
        params = NestParams::make(logistic(log_zeta), gamma, panel.inputs[n]);
      }
      const double log_zeta = std::log(params.alpha / (1.0 - params.alpha));
      const double g = params.form == NestForm::CobbDouglasLimit ? 0.0 : params.gamma;
      for (std::size_t t = 0; t < periods; ++t) {
        const double e = y[t] - log_zeta - g * x[t];
        ssr += e * e;
      }
    }
    for (std::size_t t = 0; t < periods; ++t) {
      pi[t] = nest_unit_cost(price[t], pi[t], params);
      cumulative[t] += share[t];
    }
    fit.nests.push_back(params);
    fit.sum_squared_residuals.push_back(ssr);
  }
  return fit;
}

double tfp_growth(const SectorTechnology& tech, const std::array<PriceVector, kPeriods>& prices) {
  const auto j = static_cast<Eigen::Index>(tech.sector);
  const double pi0 = cascaded_unit_cost(prices[0], tech);
  const double pi1 = cascaded_unit_cost(prices[1], tech);
  return std::log(pi1 / pi0) - std::log(prices[1].p(j) / prices[0].p(j));
}

double tornqvist_tfpg(const CostShareTable& shares, const std::array<PriceVector, kPeriods>& prices, std::size_t j) {
  const auto jj = static_cast<Eigen::Index>(j);
  const auto n = static_cast<Eigen::Index>(shares.n_sectors());
  double g = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double weight = 0.5 * (shares.a[0](i, jj) + shares.a[1](i, jj));
    if (weight != 0.0) g += weight * std::log(prices[1].p(i) / prices[0].p(i));
  }
  g += 0.5 * (shares.a_L[0](jj) + shares.a_L[1](jj)) * std::log(prices[1].w / prices[0].w);
  g += 0.5 * (shares.a_K[0](jj) + shares.a_K[1](jj)) * std::log(prices[1].r / prices[0].r);
  g -= std::log(prices[1].p(jj) / prices[0].p(jj));
  return g;
}

}  // namespace ccge
