#include "ccge/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "ccge/errors.hpp"

namespace ccge {

namespace {

// mt19937_64 output is fixed by the standard; the distributions are not, so
// uniform draws are formed here to keep seeds portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0.0, 1.0) * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

Eigen::VectorXd random_simplex(Rng& rng, std::size_t n, double lo) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = rng.uniform(lo, 1.0);
  return v / v.sum();
}

// Index of the first sector with a nest whose relative price barely moves, or n when none does.
std::size_t unidentified_sector(const SyntheticEconomy& e, const std::array<double, kPeriods>& r,
                                const std::array<double, kPeriods>& w, double min_change) {
  const auto& techs = e.model.technologies;
  for (std::size_t j = 0; j < techs.size(); ++j) {
    std::array<double, kPeriods> pi{w[0], w[1]};
    std::array<double, kPeriods> x{};
    for (const auto& nest : techs[j].nests) {
      for (std::size_t t = 0; t < kPeriods; ++t) {
        const PriceVector prices{e.states[t].p, r[t], w[t]};
        const double p = prices.input_price(nest.input);
        x[t] = std::log(p / pi[t]);
        pi[t] = nest_unit_cost(p, pi[t], nest);
      }
      if (std::abs(x[1] - x[0]) < min_change) return j;
    }
  }
  return techs.size();
}

PeriodTable build_period(const EquilibriumState& state, const Eigen::VectorXd& household_nominal,
                         const Eigen::VectorXd& formation_nominal, const Eigen::VectorXd& exports_nominal) {
  const auto n = state.p.size();
  const Eigen::VectorXd final_nominal = household_nominal + formation_nominal + exports_nominal;
  const Eigen::VectorXd v = (Eigen::MatrixXd::Identity(n, n) - state.A).partialPivLu().solve(final_nominal);
  if (!(v.array() > 0.0).all()) throw ValidationError("non-positive gross output");

  PeriodTable pt;
  pt.price = state.p;
  pt.capital_price = state.r;
  pt.wage = state.w;
  pt.output_nominal = v;
  pt.flows = state.p.cwiseInverse().asDiagonal() * state.A * v.asDiagonal();
  pt.capital = state.a_K.cwiseProduct(v) / state.r;
  pt.labor = state.a_L.cwiseProduct(v) / state.w;
  pt.household = household_nominal.cwiseQuotient(state.p);
  pt.capital_formation = formation_nominal.cwiseQuotient(state.p);
  pt.net_exports = exports_nominal.cwiseQuotient(state.p);
  return pt;
}

SyntheticEconomy draw_economy(std::size_t n, Rng& rng, const GeneratorConfig& cfg) {
  SyntheticEconomy e;
  const auto nn = static_cast<Eigen::Index>(n);

  e.hidden_order.resize(n);
  for (std::size_t k = 0; k < n; ++k) e.hidden_order[k] = k;
  for (std::size_t k = n; k > 1; --k) std::swap(e.hidden_order[k - 1], e.hidden_order[rng.index(k)]);

  const double density =
      n > 1 ? std::min(cfg.density, cfg.max_mean_inputs / static_cast<double>(n - 1)) : cfg.density;
  e.support = IncidenceMatrix(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto i = e.hidden_order[a];
      const auto j = e.hidden_order[b];
      bool used = false;
      if (a == b) {
        used = rng.bernoulli(cfg.self_use);
      } else if (a < b || !cfg.acyclic) {
        used = rng.bernoulli(density);
      }
      e.support.set(i, j, used);
    }
  }
  e.model.order = derive_stream_order(cfg.closure_order ? transitive_closure(e.support) : e.support);
  e.model.normalization_period = 1;

  std::array<double, kPeriods> r{}, w{};
  r[1] = cfg.normalized ? 1.0 : std::exp(rng.uniform(-0.3, 0.3));
  w[1] = cfg.normalized ? 1.0 : std::exp(rng.uniform(-0.3, 0.3));
  r[0] = r[1] * std::exp(rng.uniform(-cfg.factor_growth, cfg.factor_growth));
  w[0] = w[1] * std::exp(rng.uniform(-cfg.factor_growth, cfg.factor_growth));

  e.tfp_growth.resize(nn);
  e.model.technologies.resize(n);
  auto draw_sector = [&](std::size_t j) {
    SectorTechnology tech;
    tech.sector = j;
    auto nest = [&](std::size_t input) {
      return NestParams::make(rng.uniform(cfg.alpha_min, cfg.alpha_max), rng.uniform(cfg.gamma_min, cfg.gamma_max),
                              input);
    };
    tech.nests.push_back(nest(kCapitalInput));
    for (const auto i : e.model.order.permutation) {
      if (e.support(i, j)) tech.nests.push_back(nest(i));
    }
    const double g = rng.uniform(-cfg.tfp_growth, cfg.tfp_growth);
    tech.theta1 = cfg.normalized ? 1.0 : std::exp(rng.uniform(-0.2, 0.2));
    tech.theta0 = tech.theta1 * std::exp(-g);
    e.tfp_growth(static_cast<Eigen::Index>(j)) = g;
    e.model.technologies[j] = std::move(tech);
  };
  for (std::size_t j = 0; j < n; ++j) draw_sector(j);

  // A nest whose relative price barely moves leaves its exponent unidentified.
  // The offending sector is redrawn; the whole economy only when that keeps failing.
  for (int redraw = 0;; ++redraw) {
    validate_model(e.model);
    for (int t = 0; t < kPeriods; ++t) {
      const auto ts = static_cast<std::size_t>(t);
      e.states[ts] = solve_prices(e.model, r[ts], w[ts], e.model.theta(t));
    }
    if (cfg.normalized) {
      const int iterations = e.states[1].iterations;
      e.states[1] = evaluate_state(e.model, {Eigen::VectorXd::Ones(nn), 1.0, 1.0}, e.model.theta(1));
      e.states[1].iterations = iterations;
    }
    const auto j = unidentified_sector(e, r, w, cfg.min_log_price_change);
    if (j == n) break;
    if (redraw == cfg.max_retries) throw ValidationError("nest relative price barely moves");
    draw_sector(j);
  }

  e.preferences.mu = random_simplex(rng, n, 0.2);
  e.preferences.lambda = cfg.lambda;
  e.preferences.beta = cfg.beta;
  e.preferences.delta = cfg.delta;
  validate_preferences(e.preferences);

  std::array<double, kPeriods> consumption{};
  consumption[1] = cfg.consumption;
  consumption[0] = cfg.consumption * std::exp(-rng.uniform(-cfg.consumption_growth, cfg.consumption_growth));
  std::array<Eigen::VectorXd, kPeriods> household, exports, ratios;
  for (std::size_t t = 0; t < kPeriods; ++t) {
    household[t] = expenditure_shares(e.states[t].p, e.preferences) * consumption[t];
    exports[t].resize(nn);
    for (auto& x : exports[t]) x = rng.uniform(0.0, cfg.export_ratio) * consumption[t] / static_cast<double>(n);
    ratios[t] = random_simplex(rng, n, 0.1);
  }

  const double one_minus_delta = 1.0 - cfg.delta;
  const double formation1 = cfg.formation_ratio * consumption[1];
  e.tables[1] = build_period(e.states[1], household[1], ratios[1] * formation1, exports[1]);
  const double capital1 = e.tables[1].capital.sum();

  // K0 is linear in the t = 0 formation total, so the budget identity fixes it for a drawn s0 rho.
  const auto& s0 = e.states[0];
  const Eigen::MatrixXd leontief0 = Eigen::MatrixXd::Identity(nn, nn) - s0.A;
  const Eigen::VectorXd capital_multiplier = leontief0.transpose().partialPivLu().solve(s0.a_K) / s0.r;
  const double capital_base = capital_multiplier.dot(household[0] + exports[0]);
  const double capital_slope = capital_multiplier.dot(ratios[0]);
  const double s0_rho = r[1] * rng.uniform(cfg.capital_price_min, cfg.capital_price_max);
  const double room = capital1 - one_minus_delta * capital_base;
  if (!(room > 0.0)) throw ValidationError("capital stock does not grow enough");
  const double formation0 = s0_rho * room / (1.0 + s0_rho * one_minus_delta * capital_slope);
  e.tables[0] = build_period(s0, household[0], ratios[0] * formation0, exports[0]);

  const double index0 = price_index(e.states[0].p, e.preferences);
  const double index1 = price_index(e.states[1].p, e.preferences);
  const double s1_rho = ((index1 / index0) * s0_rho / cfg.beta - r[1]) / one_minus_delta;
  if (!(s1_rho > 0.0)) throw ValidationError("non-positive capital-formation price");
  e.capital_price_levels = {s0_rho, s1_rho};
  e.next_capital = formation1 / s1_rho + one_minus_delta * capital1;

  validate_tables(e.tables);
  return e;
}

}  // namespace

SyntheticEconomy generate_synthetic_economy(std::size_t n_sectors, std::uint64_t seed, const GeneratorConfig& config) {
  if (n_sectors < 1) throw ValidationError("a synthetic economy needs at least one sector");
  if (!(config.alpha_min > 0.0 && config.alpha_max < 1.0 && config.alpha_min <= config.alpha_max)) {
    throw ValidationError("alpha range must lie inside (0, 1)");
  }
  if (!(config.gamma_min <= config.gamma_max && config.gamma_max < 1.0)) {
    throw ValidationError("gamma range must lie below 1");
  }
  if (config.max_retries < 1) throw ValidationError("retry limit must be positive");
  Rng rng(seed);
  for (int attempt = 1; attempt <= config.max_retries; ++attempt) {
    try {
      auto economy = draw_economy(n_sectors, rng, config);
      economy.attempts = attempt;
      return economy;
    } catch (const ValidationError&) {
    } catch (const ConvergenceError&) {
    }
  }
  throw ConvergenceError("no acceptable synthetic economy within the retry limit", config.max_retries,
                         std::numeric_limits<double>::quiet_NaN());
}

}  // namespace ccge
