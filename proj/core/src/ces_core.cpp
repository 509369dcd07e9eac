#include "ccge/ces_core.hpp"

#include <cmath>
#include <set>

#include "ccge/errors.hpp"

namespace ccge {

std::string to_string(NestForm form) {
  switch (form) {
    case NestForm::Ces: return "CES";
    case NestForm::CobbDouglasLimit: return "COBB_DOUGLAS_LIMIT";
    case NestForm::Linear: return "LINEAR";
  }
  return "CES";
}

NestForm nest_form_from_string(const std::string& name) {
  if (name == "CES") return NestForm::Ces;
  if (name == "COBB_DOUGLAS_LIMIT") return NestForm::CobbDouglasLimit;
  if (name == "LINEAR") return NestForm::Linear;
  throw ValidationError("unknown nest form '" + name + "'");
}

NestForm classify_gamma(double gamma) {
  if (std::abs(gamma) < kCobbDouglasThreshold) return NestForm::CobbDouglasLimit;
  if (gamma == 1.0) return NestForm::Linear;
  return NestForm::Ces;
}

NestParams NestParams::make(double alpha, double gamma, std::size_t input) {
  return {alpha, gamma, input, classify_gamma(gamma)};
}

void validate_technology(const SectorTechnology& tech, std::size_t n_commodities) {
  const std::string where = "sector " + std::to_string(tech.sector + 1) + ": ";
  if (tech.nests.empty()) throw ValidationError(where + "technology has no nests");
  if (tech.nests.front().input != kCapitalInput) throw ValidationError(where + "nest 0 must take capital");
  std::set<std::size_t> seen;
  for (std::size_t n = 0; n < tech.nests.size(); ++n) {
    const auto& nest = tech.nests[n];
    if (!(nest.alpha >= 0.0 && nest.alpha <= 1.0)) throw ValidationError(where + "alpha outside [0,1]");
    if (!std::isfinite(nest.gamma) || nest.gamma > 1.0) throw ValidationError(where + "gamma must be <= 1");
    if (n > 0) {
      if (nest.input == kCapitalInput || nest.input >= n_commodities) {
        throw ValidationError(where + "nest input out of range");
      }
      if (!seen.insert(nest.input).second) throw ValidationError(where + "duplicate nest input");
    }
  }
  if (!(tech.theta0 > 0.0) || !(tech.theta1 > 0.0)) throw ValidationError(where + "TFP must be positive");
}

namespace {

/// Value of one nest plus the cost share of its direct input.
struct NestValue {
  double cost;
  double share;  ///< p c_p / c
};

/// Exponent the evaluated form actually uses.
double effective_gamma(const NestParams& nest) {
  switch (nest.form) {
    case NestForm::CobbDouglasLimit: return 0.0;
    case NestForm::Linear: return 1.0;
    case NestForm::Ces: return nest.gamma;
  }
  return nest.gamma;
}

NestValue evaluate_nest(double p, double pi, const NestParams& nest) {
  if (!(p > 0.0) || !(pi > 0.0) || !std::isfinite(p) || !std::isfinite(pi)) {
    throw ValidationError("nest unit cost requires strictly positive prices");
  }
  const double alpha = nest.alpha;
  switch (nest.form) {
    case NestForm::Linear: {
      const double c = alpha * p + (1.0 - alpha) * pi;
      return {c, alpha * p / c};
    }
    case NestForm::CobbDouglasLimit: {
      const double c = std::exp(alpha * std::log(p) + (1.0 - alpha) * std::log(pi));
      return {c, alpha};
    }
    case NestForm::Ces: break;
  }
  const double g = nest.gamma;
  if (std::abs(g) < kLogSpaceThreshold) {
    const double log_p = std::log(p);
    const double log_pi = std::log(pi);
    const double log_c = log_pi + std::log1p(alpha * std::expm1(g * (log_p - log_pi))) / g;
    return {std::exp(log_c), alpha * std::exp(g * (log_p - log_c))};
  }
  const double wp = alpha * std::pow(p, g);
  const double w = wp + (1.0 - alpha) * std::pow(pi, g);
  return {std::pow(w, 1.0 / g), wp / w};
}

/// First and second partials of one nest at its evaluation point.
struct NestPartials {
  double p, pi, cost;
  double c_p, c_pi, c_pp, c_pipi, c_ppi;
};

NestPartials partials(double p, double pi, const NestParams& nest) {
  const auto v = evaluate_nest(p, pi, nest);
  const double g = effective_gamma(nest);
  NestPartials d{};
  d.p = p;
  d.pi = pi;
  d.cost = v.cost;
  d.c_p = v.share * v.cost / p;
  d.c_pi = (1.0 - v.share) * v.cost / pi;
  d.c_pp = (1.0 - g) * d.c_p * (v.share - 1.0) / p;
  d.c_pipi = -(1.0 - g) * d.c_pi * v.share / pi;
  d.c_ppi = (1.0 - g) * d.c_p * d.c_pi / v.cost;
  return d;
}

/// Forward pass storing nest partials; compound price pi_n enters nest n.
std::vector<NestPartials> forward(const PriceVector& prices, const SectorTechnology& tech) {
  if (tech.nests.empty()) throw ValidationError("technology has no nests");
  std::vector<NestPartials> out;
  out.reserve(tech.nests.size());
  double pi = prices.w;
  for (const auto& nest : tech.nests) {
    out.push_back(partials(prices.input_price(nest.input), pi, nest));
    pi = out.back().cost;
  }
  return out;
}

}  // namespace

double nest_unit_cost(double p_n, double pi_n, const NestParams& params) {
  return evaluate_nest(p_n, pi_n, params).cost;
}

double nest_share(double p_n, double pi_n, const NestParams& params) {
  return evaluate_nest(p_n, pi_n, params).share;
}

double cascaded_unit_cost(const PriceVector& prices, const SectorTechnology& tech) {
  if (tech.nests.empty()) throw ValidationError("technology has no nests");
  double pi = prices.w;
  for (const auto& nest : tech.nests) pi = evaluate_nest(prices.input_price(nest.input), pi, nest).cost;
  return pi;
}

CostShares cost_share_gradient(const PriceVector& prices, const SectorTechnology& tech) {
  if (tech.nests.empty()) throw ValidationError("technology has no nests");
  const std::size_t k = tech.nests.size();
  std::vector<NestValue> values;
  values.reserve(k);
  double pi = prices.w;
  for (const auto& nest : tech.nests) {
    values.push_back(evaluate_nest(prices.input_price(nest.input), pi, nest));
    pi = values.back().cost;
  }
  // Backward pass in share form: the share of the compound entering nest n is
  // the product of (1 - share) over all outer nests.
  CostShares shares;
  shares.unit_cost = pi;
  shares.inputs.assign(k - 1, 0.0);
  double outer = 1.0;
  for (std::size_t n = k; n-- > 1;) {
    shares.inputs[n - 1] = outer * values[n].share;
    outer *= 1.0 - values[n].share;
  }
  shares.capital = outer * values[0].share;
  shares.labor = outer * (1.0 - values[0].share);
  return shares;
}

std::size_t cascade_size(const SectorTechnology& tech) { return tech.nests.size() + 1; }

double position_price(const PriceVector& prices, const SectorTechnology& tech, std::size_t position) {
  if (position == 0) return prices.w;
  return prices.input_price(tech.nests.at(position - 1).input);
}

std::string position_label(const SectorTechnology& tech, std::size_t position) {
  if (position == 0) return "L";
  const auto input = tech.nests.at(position - 1).input;
  return input == kCapitalInput ? "K" : std::to_string(input + 1);
}

CascadeDerivatives cascade_derivatives(const PriceVector& prices, const SectorTechnology& tech) {
  const auto nest = forward(prices, tech);
  const std::size_t k = nest.size();
  const std::size_t m = k + 1;

  // d_chain[n] = dC/dpi_n and e_chain[n] = d2C/dpi_n^2, where pi_k = C.
  std::vector<double> d_chain(k + 1, 0.0), e_chain(k + 1, 0.0);
  d_chain[k] = 1.0;
  for (std::size_t n = k; n-- > 0;) {
    d_chain[n] = d_chain[n + 1] * nest[n].c_pi;
    e_chain[n] = e_chain[n + 1] * nest[n].c_pi * nest[n].c_pi + d_chain[n + 1] * nest[n].c_pipi;
  }

  auto entry_nest = [](std::size_t x) { return x == 0 ? std::size_t{0} : x - 1; };
  auto direct = [&](std::size_t x) { return x == 0 ? nest[0].c_pi : nest[x - 1].c_p; };
  auto direct2 = [&](std::size_t x) { return x == 0 ? nest[0].c_pipi : nest[x - 1].c_pp; };

  CascadeDerivatives out;
  out.unit_cost = nest.back().cost;
  out.gradient.resize(static_cast<Eigen::Index>(m));
  out.hessian.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t x = 0; x < m; ++x) {
    const auto kx = entry_nest(x);
    out.gradient(static_cast<Eigen::Index>(x)) = d_chain[kx + 1] * direct(x);
    out.hessian(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) =
        e_chain[kx + 1] * direct(x) * direct(x) + d_chain[kx + 1] * direct2(x);
  }
  for (std::size_t y = 1; y < m; ++y) {
    const auto ky = entry_nest(y);
    // Sensitivity of dC/dpi_ky to the direct input of nest ky.
    const double outer_term = e_chain[ky + 1] * nest[ky].c_p * nest[ky].c_pi + d_chain[ky + 1] * nest[ky].c_ppi;
    double ladder = 1.0;  // product of c_pi over nests strictly between entry(x) and ky
    for (std::size_t x = y; x-- > 0;) {
      const auto kx = entry_nest(x);
      double value = 0.0;
      if (kx == ky) {
        value = e_chain[1] * nest[0].c_p * nest[0].c_pi + d_chain[1] * nest[0].c_ppi;
      } else {
        value = direct(x) * ladder * outer_term;
      }
      out.hessian(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = value;
      out.hessian(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = value;
      if (x >= 2) ladder *= nest[x - 1].c_pi;
    }
  }
  return out;
}

double aues(const SectorTechnology& tech, const PriceVector& prices, std::size_t i, std::size_t j) {
  if (i == j) throw ValidationError("AUES requires two distinct inputs");
  const auto m = cascade_size(tech);
  if (i >= m || j >= m) throw ValidationError("AUES input position out of range");
  const auto d = cascade_derivatives(prices, tech);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return d.unit_cost * d.hessian(ii, jj) / (d.gradient(ii) * d.gradient(jj));
}

double mes(const SectorTechnology& tech, const PriceVector& prices, std::size_t i, std::size_t j) {
  if (i == j) throw ValidationError("MES requires two distinct inputs");
  const auto m = cascade_size(tech);
  if (i >= m || j >= m) throw ValidationError("MES input position out of range");
  const auto d = cascade_derivatives(prices, tech);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  const double pj = position_price(prices, tech, j);
  // a_j (AUES_ij - AUES_jj) = p_j (C_ij / C_i - C_jj / C_j)
  return pj * (d.hessian(ii, jj) / d.gradient(ii) - d.hessian(jj, jj) / d.gradient(jj));
}

ElasticityTables elasticity_tables(const SectorTechnology& tech, const PriceVector& prices) {
  const auto d = cascade_derivatives(prices, tech);
  const auto m = static_cast<Eigen::Index>(cascade_size(tech));
  ElasticityTables out;
  out.aues = Eigen::MatrixXd::Constant(m, m, std::nan(""));
  out.mes = Eigen::MatrixXd::Constant(m, m, std::nan(""));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      const double pj = position_price(prices, tech, static_cast<std::size_t>(j));
      out.aues(i, j) = d.unit_cost * d.hessian(i, j) / (d.gradient(i) * d.gradient(j));
      out.mes(i, j) = pj * (d.hessian(i, j) / d.gradient(i) - d.hessian(j, j) / d.gradient(j));
    }
  }
  return out;
}

}  // namespace ccge
