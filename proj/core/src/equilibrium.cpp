#include "ccge/equilibrium.hpp"

#include <cmath>
#include <limits>

#include "ccge/errors.hpp"

namespace ccge {

Eigen::VectorXd EconomyModel::theta(int t) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(technologies.size()));
  for (std::size_t j = 0; j < technologies.size(); ++j) out(static_cast<Eigen::Index>(j)) = technologies[j].theta(t);
  return out;
}

void validate_model(const EconomyModel& model) {
  if (model.technologies.empty()) throw ValidationError("economy has no sectors");
  for (std::size_t j = 0; j < model.technologies.size(); ++j) {
    const auto& tech = model.technologies[j];
    if (tech.sector != j) throw ValidationError("technology " + std::to_string(j + 1) + " is out of order");
    validate_technology(tech, model.technologies.size());
  }
}

Eigen::VectorXd price_map(const EconomyModel& model, const PriceVector& prices, const Eigen::VectorXd& theta) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j) = cascaded_unit_cost(prices, model.technologies[static_cast<std::size_t>(j)]) / theta(j);
  }
  return out;
}

namespace {

double relative_sup(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

/// max_i |a_i - b_i| / |b_i|; prices spanning orders of magnitude need the per-entry scale.
double entrywise_relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return ((a - b).array() / b.array()).abs().maxCoeff();
}

void check_inputs(const EconomyModel& model, double r, double w, const Eigen::VectorXd& theta) {
  if (!(r > 0.0) || !(w > 0.0) || !std::isfinite(r) || !std::isfinite(w)) {
    throw ValidationError("factor prices must be strictly positive");
  }
  if (theta.size() != static_cast<Eigen::Index>(model.size())) throw ValidationError("theta has the wrong length");
  if (!(theta.array() > 0.0).all() || !theta.allFinite()) throw ValidationError("TFP levels must be strictly positive");
}

}  // namespace

EquilibriumState evaluate_state(const EconomyModel& model, const PriceVector& prices, const Eigen::VectorXd& theta) {
  check_inputs(model, prices.r, prices.w, theta);
  const auto n = static_cast<Eigen::Index>(model.size());
  EquilibriumState state;
  state.p = prices.p;
  state.r = prices.r;
  state.w = prices.w;
  state.theta = theta;
  state.A = Eigen::MatrixXd::Zero(n, n);
  state.a_K.resize(n);
  state.a_L.resize(n);
  Eigen::VectorXd mapped(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& tech = model.technologies[static_cast<std::size_t>(j)];
    const auto shares = cost_share_gradient(prices, tech);
    mapped(j) = shares.unit_cost / theta(j);
    state.a_K(j) = shares.capital;
    state.a_L(j) = shares.labor;
    for (std::size_t k = 1; k < tech.nests.size(); ++k) {
      state.A(static_cast<Eigen::Index>(tech.nests[k].input), j) = shares.inputs[k - 1];
    }
  }
  state.residual = relative_sup(mapped, prices.p);
  return state;
}

EquilibriumState solve_prices(const EconomyModel& model, double r, double w, const Eigen::VectorXd& theta,
                              const std::optional<Eigen::VectorXd>& p_init, const SolverOptions& options) {
  check_inputs(model, r, w, theta);
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw ValidationError("damping must lie in (0, 1]");
  if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
    throw ValidationError("solver needs a positive tolerance and iteration cap");
  }
  const auto n = static_cast<Eigen::Index>(model.size());
  PriceVector prices{p_init.value_or(Eigen::VectorXd::Ones(n)), r, w};
  if (prices.p.size() != n || !(prices.p.array() > 0.0).all()) {
    throw ValidationError("initial prices must be strictly positive");
  }

  constexpr double kRoundoff = 8.0 * std::numeric_limits<double>::epsilon();
  double change = std::numeric_limits<double>::infinity();
  double previous = change;
  bool converged = false;
  int iteration = 0;
  while (iteration < options.max_iterations) {
    ++iteration;
    Eigen::VectorXd next = price_map(model, prices, theta);
    if (options.damping < 1.0) next = options.damping * next + (1.0 - options.damping) * prices.p;
    change = entrywise_relative(next, prices.p);
    prices.p = std::move(next);
    if (!prices.p.allFinite()) throw ConvergenceError("price iteration diverged", iteration, change);
    // A small step is not a small error when the map contracts slowly: also require the
    // a posteriori bound q/(1-q) * step, with q estimated from the last two steps.
    const double rate = change / previous;
    const double bound = rate < 1.0 ? change * rate / (1.0 - rate) : std::numeric_limits<double>::infinity();
    if (change < options.tolerance && (bound < options.tolerance || change < kRoundoff)) {
      converged = true;
      break;
    }
    previous = change;
  }
  if (!converged) {
    throw ConvergenceError("price fixed point did not converge", iteration, change);
  }
  auto state = evaluate_state(model, prices, theta);
  state.iterations = iteration;
  return state;
}

FactorPath FactorPath::from_tables(const LinkedIOTables& tables) {
  return {{tables[0].capital_price, tables[1].capital_price}, {tables[0].wage, tables[1].wage}};
}

EconomyCalibration calibrate_economy(const LinkedIOTables& normalized_tables, const StreamOrder& order) {
  const auto shares = compute_cost_shares(normalized_tables);
  const auto prices = period_prices(normalized_tables);
  EconomyCalibration out;
  out.model.order = order;
  out.model.normalization_period = 1;
  for (std::size_t j = 0; j < normalized_tables.n_sectors(); ++j) {
    auto sector = calibrate_sector(shares, prices, order, j);
    out.model.technologies.push_back(std::move(sector.technology));
    out.traces.push_back(std::move(sector.trace));
  }
  return out;
}

std::array<EquilibriumState, kPeriods> restore_structures(const EconomyModel& model, const FactorPath& factors,
                                                          const SolverOptions& options) {
  validate_model(model);
  return {solve_prices(model, factors.r[0], factors.w[0], model.theta(0), std::nullopt, options),
          solve_prices(model, factors.r[1], factors.w[1], model.theta(1), std::nullopt, options)};
}

EquilibriumState interpolated_state(const EconomyModel& model, const FactorPath& factors, double s,
                                    const SolverOptions& options) {
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("interpolation weight must lie in [0, 1]");
  validate_model(model);
  const double r = (1.0 - s) * factors.r[0] + s * factors.r[1];
  const double w = (1.0 - s) * factors.w[0] + s * factors.w[1];
  const Eigen::VectorXd theta = (1.0 - s) * model.theta(0) + s * model.theta(1);
  return solve_prices(model, r, w, theta, std::nullopt, options);
}

HalfwayResult halfway_state(const EconomyModel& model, const FactorPath& factors, const SolverOptions& options) {
  HalfwayResult out;
  out.state = interpolated_state(model, factors, 0.5, options);
  const auto start = solve_prices(model, factors.r[0], factors.w[0], model.theta(0), std::nullopt, options);
  out.labor_intensity_growth = labor_intensity_growth(start.a_L, out.state.a_L);
  return out;
}

Eigen::VectorXd labor_intensity_growth(const Eigen::VectorXd& a_L0, const Eigen::VectorXd& a_L1) {
  return (a_L1.array() / a_L0.array()).log().matrix();
}

}  // namespace ccge
