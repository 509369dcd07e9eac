#include "ccge/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccge/errors.hpp"

namespace ccge {

std::string to_string(SystemVariant system) {
  switch (system) {
    case SystemVariant::Ces: return "ces";
    case SystemVariant::CobbDouglas: return "cobb_douglas";
    case SystemVariant::Leontief: return "leontief";
  }
  return "ces";
}

SystemVariant system_variant_from_string(const std::string& name) {
  if (name == "ces") return SystemVariant::Ces;
  if (name == "cobb_douglas") return SystemVariant::CobbDouglas;
  if (name == "leontief") return SystemVariant::Leontief;
  throw ValidationError("unknown system '" + name + "' (expected ces, cobb_douglas or leontief)");
}

EconomyModel system_variant(const EconomyModel& model, SystemVariant system, const PriceVector& prices) {
  validate_model(model);
  if (system == SystemVariant::Ces) return model;
  EconomyModel out = model;
  for (auto& tech : out.technologies) {
    double pi_source = prices.w;
    double pi = prices.w;
    for (auto& nest : tech.nests) {
      const double p = prices.input_price(nest.input);
      const double share = nest_share(p, pi_source, nest);
      pi_source = nest_unit_cost(p, pi_source, nest);
      NestParams replaced = nest;
      if (system == SystemVariant::CobbDouglas) {
        replaced.alpha = share;
        replaced.gamma = 0.0;
        replaced.form = NestForm::CobbDouglasLimit;
      } else {
        replaced.alpha = share * pi / (share * pi + (1.0 - share) * p);
        replaced.gamma = 1.0;
        replaced.form = NestForm::Linear;
      }
      pi = nest_unit_cost(p, pi, replaced);
      nest = replaced;
    }
    const double factor = pi / pi_source;
    tech.theta0 *= factor;
    tech.theta1 *= factor;
  }
  return out;
}

Baseline make_baseline(const EconomyModel& model, const LinkedIOTables& normalized_tables,
                       const HouseholdPreferences& prefs, const CounterfactualConfig& config) {
  validate_model(model);
  validate_preferences(prefs);
  const auto& t1 = normalized_tables[1];
  if (t1.price.size() != static_cast<Eigen::Index>(model.size())) {
    throw ValidationError("tables and model differ in sector count");
  }

  Baseline b;
  b.r = t1.capital_price;
  b.w = t1.wage;
  b.p = solve_prices(model, b.r, b.w, model.theta(1), t1.price, config.solver).p;
  b.price_index = price_index(b.p, prefs);

  const auto accounts = aggregate_accounts(normalized_tables);
  b.consumption = accounts.period[1].consumption;
  b.labor = accounts.period[1].labor;
  b.capital = accounts.period[1].capital;
  b.net_exports = accounts.period[1].net_exports;
  b.net_exports_nominal = t1.price.cwiseProduct(t1.net_exports);
  b.output_nominal = t1.output_nominal;

  const Eigen::VectorXd formation = t1.price.cwiseProduct(t1.capital_formation);
  b.formation_total = formation.sum();
  b.formation_ratios = b.formation_total != 0.0 ? Eigen::VectorXd(formation / b.formation_total)
                                                 : Eigen::VectorXd::Zero(formation.size());

  b.capital_prices = recover_capital_prices(accounts, prefs, price_index(normalized_tables[0].price, prefs),
                                            price_index(t1.price, prefs));
  if (b.capital_prices.negative) throw ValidationError("recovered capital-formation price is not positive");
  const double s0 = b.capital_prices.s_rho[0];
  const double s1 = b.capital_prices.s_rho[1];
  b.net_formation0 = accounts.period[1].capital - (1.0 - prefs.delta) * accounts.period[0].capital;
  b.net_formation1 = b.formation_total / s1;

  if (config.eta) {
    b.eta = *config.eta;
  } else if (config.next_capital) {
    if (std::abs(s1 - s0) < 1e-12 * std::abs(s0)) {
      throw ValidationError("capital-formation price unchanged; eta cannot be measured");
    }
    const double n1 = *config.next_capital - (1.0 - prefs.delta) * b.capital;
    b.eta = (n1 - b.net_formation0) / (s1 - s0) * s0 / b.net_formation0;
    b.eta_measured = true;
  }
  if (!std::isfinite(b.eta)) throw ValidationError("eta must be finite");
  return b;
}

Eigen::VectorXd inject_shock(const Eigen::VectorXd& theta, std::size_t k, double size,
                             const Eigen::VectorXd& output_nominal) {
  const auto kk = static_cast<Eigen::Index>(k);
  if (kk >= theta.size() || output_nominal.size() != theta.size()) throw ValidationError("invalid shocked sector");
  if (!(output_nominal(kk) > 0.0)) throw ValidationError("shocked sector has no output");
  if (!(size >= 0.0) || !std::isfinite(size)) throw ValidationError("shock size must be non-negative");
  Eigen::VectorXd out = theta;
  out(kk) = theta(kk) * (output_nominal(kk) + size) / output_nominal(kk);
  return out;
}

double effectiveness(double welfare_gain, const HouseholdPreferences& prefs, double size) {
  return welfare_gain / ((1.0 - prefs.beta) * size);
}

namespace {

void check_spectral_radius(const Eigen::MatrixXd& A) {
  // Non-negative columns summing below one bound the spectral radius below one.
  if (A.colwise().sum().maxCoeff() < 1.0) return;
  const double radius = A.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0)) throw ValidationError("Leontief inverse undefined: spectral radius of A' >= 1");
}

double relative_change(double next, double prev) {
  const double scale = std::max(std::abs(prev), 1e-300);
  return std::abs(next - prev) / scale;
}

}  // namespace

CounterfactualOutcome solve_alternative_equilibrium(const EconomyModel& model, const HouseholdPreferences& prefs,
                                                    const Baseline& baseline, const CounterfactualConfig& config,
                                                    const Eigen::VectorXd& theta_prime) {
  if (!(config.outer_tolerance > 0.0) || config.max_outer_iterations < 1) {
    throw ValidationError("outer loop needs a positive tolerance and iteration cap");
  }
  const auto state = solve_prices(model, baseline.r, baseline.w, theta_prime, baseline.p, config.solver);
  const auto n = static_cast<Eigen::Index>(model.size());
  const double one_minus_delta = 1.0 - prefs.delta;

  CounterfactualOutcome out;
  out.theta = theta_prime;
  out.p = state.p;
  out.A = state.A;
  out.a_L = state.a_L;
  out.price_iterations = state.iterations;
  out.r = baseline.r;
  out.w = baseline.w;
  out.capital = baseline.capital;
  out.net_exports = baseline.net_exports;
  out.net_exports_nominal = baseline.net_exports_nominal;
  out.price_index = price_index(state.p, prefs);

  const auto& caps = baseline.capital_prices;
  out.capital_price_level =
      ((out.price_index / baseline.price_index) * (caps.s_rho[1] * one_minus_delta + baseline.r) - baseline.r) /
      one_minus_delta;
  out.net_formation = baseline.net_formation1 + baseline.eta * (out.capital_price_level - caps.s_rho[1]) *
                                                    baseline.net_formation0 / caps.s_rho[0];
  out.next_capital = out.net_formation + one_minus_delta * baseline.capital;
  out.formation_total = out.capital_price_level * out.net_formation;
  out.formation_nominal = baseline.formation_ratios * out.formation_total;

  check_spectral_radius(state.A);
  const Eigen::MatrixXd leontief = Eigen::MatrixXd::Identity(n, n) - state.A;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(leontief);
  const Eigen::VectorXd labor_multiplier = leontief.transpose().partialPivLu().solve(state.a_L) / baseline.w;
  const Eigen::VectorXd shares = expenditure_shares(state.p, prefs);
  const Eigen::VectorXd autonomous = out.formation_nominal + out.net_exports_nominal;

  const double fixed_income = baseline.r * baseline.capital - out.formation_total - baseline.net_exports;
  double labor = baseline.labor;
  double consumption = baseline.consumption;
  for (out.iterations = 1; out.iterations <= config.max_outer_iterations; ++out.iterations) {
    const double next_consumption = fixed_income + baseline.w * labor;
    const double next_labor = labor_multiplier.dot(shares * next_consumption + autonomous);
    const double change = std::max(relative_change(next_consumption, consumption), relative_change(next_labor, labor));
    consumption = next_consumption;
    labor = next_labor;
    if (!std::isfinite(consumption) || !std::isfinite(labor)) break;
    if (change < config.outer_tolerance) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    throw ConvergenceError("budget/labor loop did not converge", config.max_outer_iterations,
                           relative_change(consumption, baseline.consumption));
  }
  out.consumption = consumption;
  out.labor = labor;
  out.household_nominal = shares * consumption;

  const Eigen::VectorXd final_demand = out.household_nominal + autonomous;
  out.output_nominal = lu.solve(final_demand);
  out.leontief_residual = (leontief * out.output_nominal - final_demand).norm() / final_demand.norm();

  out.benefit = (out.consumption / out.price_index - baseline.consumption / baseline.price_index) * baseline.price_index;
  out.cost = baseline.w * (out.labor - baseline.labor);
  out.welfare_gain = out.benefit - out.cost;
  out.effectiveness = effectiveness(out.welfare_gain, prefs, config.shock_size);
  return out;
}

SweepResult run_shock_sweep(const EconomyModel& model, const HouseholdPreferences& prefs, const Baseline& baseline,
                            const CounterfactualConfig& config, const SweepOptions& options) {
  const std::size_t n = model.size();
  if (!options.classification.empty() && options.classification.size() != n) {
    throw ValidationError("classification labels must cover every sector");
  }
  if (!(config.shock_size > 0.0)) throw ValidationError("shock size must be positive");
  const auto stream_ranks = model.order.ranks();
  const PriceVector reference{baseline.p, baseline.r, baseline.w};

  SweepResult result;
  for (const auto system : options.systems) {
    const auto variant = system_variant(model, system, reference);
    const Eigen::VectorXd theta = variant.theta(1);
    const std::size_t first = result.entries.size();
    for (std::size_t k = 0; k < n; ++k) {
      SweepEntry entry;
      entry.sector = k;
      entry.system = system;
      entry.stream_rank = k < stream_ranks.size() ? stream_ranks[k] + 1 : 0;
      if (!options.classification.empty()) entry.classification = options.classification[k];
      try {
        auto outcome = solve_alternative_equilibrium(variant, prefs, baseline, config,
                                                     inject_shock(theta, k, config.shock_size, baseline.output_nominal));
        outcome.shocked_sector = k;
        outcome.system = system;
        entry.outcome = std::move(outcome);
      } catch (const Error& e) {
        entry.error = e.what();
        ++result.failures;
      }
      result.entries.push_back(std::move(entry));
    }

    std::vector<std::size_t> solved;
    for (std::size_t i = first; i < result.entries.size(); ++i) {
      if (result.entries[i].outcome) solved.push_back(i);
    }
    std::stable_sort(solved.begin(), solved.end(), [&](std::size_t a, std::size_t b) {
      return result.entries[a].outcome->effectiveness > result.entries[b].outcome->effectiveness;
    });
    for (std::size_t r = 0; r < solved.size(); ++r) result.entries[solved[r]].effectiveness_rank = r + 1;
  }
  return result;
}

}  // namespace ccge
