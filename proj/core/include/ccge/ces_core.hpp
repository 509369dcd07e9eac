#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace ccge {

/// Functional form of one binary nest.
enum class NestForm {
  Ces,               ///< (alpha p^g + (1-alpha) pi^g)^(1/g)
  CobbDouglasLimit,  ///< p^alpha pi^(1-alpha), the g -> 0 limit
  Linear,            ///< alpha p + (1-alpha) pi, the g = 1 (Leontief primal) case
};

std::string to_string(NestForm form);
NestForm nest_form_from_string(const std::string& name);

/// |gamma| below this switches a nest to the Cobb-Douglas limit.
inline constexpr double kCobbDouglasThreshold = 1e-9;
/// |gamma| below this (but above the Cobb-Douglas threshold) is evaluated in log-price space.
inline constexpr double kLogSpaceThreshold = 1e-3;
/// Input id of the capital-service input (always the direct input of nest 0).
inline constexpr std::size_t kCapitalInput = std::numeric_limits<std::size_t>::max();

struct NestParams {
  double alpha = 0.5;
  double gamma = 0.0;
  std::size_t input = kCapitalInput;  ///< 0-based commodity index, or kCapitalInput
  NestForm form = NestForm::CobbDouglasLimit;

  /// Builds a nest with the form implied by gamma.
  static NestParams make(double alpha, double gamma, std::size_t input);
  /// Elasticity of substitution between the nest input and the inner compound.
  double elasticity() const { return 1.0 - gamma; }
};

NestForm classify_gamma(double gamma);

/// Cascaded CES technology of one sector: nests[0] compounds K with L, later
/// nests add one intermediate input each, innermost first.
struct SectorTechnology {
  std::size_t sector = 0;
  std::vector<NestParams> nests;
  double theta0 = 1.0;
  double theta1 = 1.0;

  double theta(int t) const { return t == 0 ? theta0 : theta1; }
};

/// Commodity prices p, capital service price r and wage w.
struct PriceVector {
  Eigen::VectorXd p;
  double r = 1.0;
  double w = 1.0;

  /// Price of the direct input of a nest.
  double input_price(std::size_t input) const {
    return input == kCapitalInput ? r : p(static_cast<Eigen::Index>(input));
  }
  PriceVector scaled(double k) const { return {p * k, r * k, w * k}; }
};

/// Throws ValidationError unless the technology is well formed for `n_commodities`.
void validate_technology(const SectorTechnology& tech, std::size_t n_commodities);

double nest_unit_cost(double p_n, double pi_n, const NestParams& params);

/// Cost share p_n c_p / c of the direct input within one nest.
double nest_share(double p_n, double pi_n, const NestParams& params);

/// Pi = c_N(p_N, ... c_1(p_1, c_0(r, w)) ...).
double cascaded_unit_cost(const PriceVector& prices, const SectorTechnology& tech);

/// Cost shares p_x C_x / C of every cascade input.
struct CostShares {
  double unit_cost = 0.0;
  double capital = 0.0;        ///< a_K
  double labor = 0.0;          ///< a_L
  std::vector<double> inputs;  ///< share of nests[n].input for n >= 1 (inputs[n-1])
};

/// Analytic shares via a forward pass over nests and a backward chain-rule pass.
CostShares cost_share_gradient(const PriceVector& prices, const SectorTechnology& tech);

/// Cascade positions index every input of a sector in nesting order:
/// position 0 is labor (w), position 1 capital (r), position n >= 2 the direct
/// input of nests[n-1]. Position n >= 1 enters through nests[n-1], whose
/// exponent is the "gamma_n" of that position.
std::size_t cascade_size(const SectorTechnology& tech);
double position_price(const PriceVector& prices, const SectorTechnology& tech, std::size_t position);
std::string position_label(const SectorTechnology& tech, std::size_t position);

/// Unit cost with its analytic gradient and Hessian over cascade positions.
struct CascadeDerivatives {
  double unit_cost = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

CascadeDerivatives cascade_derivatives(const PriceVector& prices, const SectorTechnology& tech);

/// Allen-Uzawa elasticity C C_ij / (C_i C_j) between two distinct positions.
double aues(const SectorTechnology& tech, const PriceVector& prices, std::size_t i, std::size_t j);
/// Morishima elasticity a_j (AUES_ij - AUES_jj).
double mes(const SectorTechnology& tech, const PriceVector& prices, std::size_t i, std::size_t j);

/// Dense AUES/MES matrices over positions (diagonal entries are NaN).
struct ElasticityTables {
  Eigen::MatrixXd aues;
  Eigen::MatrixXd mes;
};

ElasticityTables elasticity_tables(const SectorTechnology& tech, const PriceVector& prices);

}  // namespace ccge
