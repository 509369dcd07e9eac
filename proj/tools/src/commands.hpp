#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccge/household.hpp"
#include "ccge/synthetic.hpp"
#include "json.hpp"

namespace ccge::cli {

struct RunConfig {
  std::filesystem::path input;   ///< table directory
  std::filesystem::path output;  ///< artifact directory
  std::filesystem::path technology;      ///< optional technology.json instead of calibrating
  std::filesystem::path preferences;     ///< optional preferences.json instead of estimating
  std::filesystem::path panel;           ///< optional expenditure panel CSV
  std::filesystem::path classification;  ///< optional sector_id,label CSV

  int normalization_period = 1;
  std::string incidence = "period0";  ///< period0, period1 or union
  bool closure = false;
  double balance_tolerance = 1e-8;
  double balance_warning = 1e-10;

  double tolerance = 1e-12;
  int max_iterations = 10000;
  double damping = 1.0;

  std::optional<double> lambda;
  double beta = kDefaultBeta;
  double delta = kDefaultDelta;

  std::optional<double> eta;
  std::optional<double> next_capital;
  double shock_size = 1.0;
  double outer_tolerance = 1e-10;
  int max_outer_iterations = 1000;
  std::vector<std::string> systems{"ces", "cobb_douglas", "leontief"};
  bool outcomes = false;

  int elasticity_period = 1;

  std::size_t n_sectors = 10;
  std::uint64_t seed = 0;
  GeneratorConfig generator;
};

/// Effective configuration of a command, as recorded in manifest.json.
nlohmann::json config_json(const RunConfig& config, const std::string& command);

void cmd_generate(const RunConfig& config);
void cmd_order(const RunConfig& config);
void cmd_calibrate(const RunConfig& config);
void cmd_solve(const RunConfig& config);
void cmd_household(const RunConfig& config);
void cmd_shock(const RunConfig& config);
void cmd_elasticities(const RunConfig& config);
/// order, calibrate, solve, household, shock and elasticities into one directory.
void cmd_pipeline(const RunConfig& config);

}  // namespace ccge::cli
