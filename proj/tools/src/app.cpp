#include "app.hpp"

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccge/errors.hpp"
#include "commands.hpp"

namespace ccge::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description, std::string& config) {
  auto* sub = app.add_subcommand(name, description);
  sub->add_option("--config", config, "TOML or INI file with option defaults");
  return sub;
}

// Options set on the command line take precedence over the file.
void apply_config_file(CLI::App& sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::FileError& e) {
    throw IoError(e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name())) continue;
    CLI::Option* op = sub.get_option_no_throw("--" + item.name);
    if (op == nullptr) throw ValidationError(path + ": unknown option '" + item.name + "'");
    if (op->count() > 0) continue;
    try {
      op->add_result(item.inputs);
      op->run_callback();
    } catch (const CLI::Error& e) {
      throw ValidationError(path + ": " + item.name + ": " + e.what());
    }
  }
}

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("-o,--output", c.output, "Output directory");
}

void add_tables(CLI::App* sub, RunConfig& c) {
  sub->add_option("-i,--input", c.input, "Directory with the two-period tables");
  sub->add_option("--normalization-period", c.normalization_period, "Period whose prices are set to one")
      ->check(CLI::Range(0, 1));
  sub->add_option("--balance-tolerance", c.balance_tolerance, "Relative balance residual that is rejected");
  sub->add_option("--balance-warning", c.balance_warning, "Relative balance residual that is reported");
}

void add_ordering(CLI::App* sub, RunConfig& c) {
  sub->add_option("--incidence", c.incidence, "Incidence source")
      ->check(CLI::IsMember({"period0", "period1", "union"}));
  sub->add_flag("--closure", c.closure, "Order on the transitive closure of the incidence matrix");
}

void add_technology(CLI::App* sub, RunConfig& c) {
  add_ordering(sub, c);
  sub->add_option("--technology", c.technology, "Use a technology.json instead of calibrating");
}

void add_solver(CLI::App* sub, RunConfig& c) {
  sub->add_option("--tolerance", c.tolerance, "Relative price fixed-point tolerance");
  sub->add_option("--max-iterations", c.max_iterations, "Price fixed-point iteration cap");
  sub->add_option("--damping", c.damping, "Fixed-point damping in (0, 1]");
}

void add_household(CLI::App* sub, RunConfig& c) {
  sub->add_option("--preferences", c.preferences, "Use a preferences.json instead of estimating");
  sub->add_option("--panel", c.panel, "Expenditure panel CSV for the lambda estimation");
  sub->add_option("--lambda", c.lambda, "Fix the household CES exponent");
  sub->add_option("--beta", c.beta, "Discount factor per period");
  sub->add_option("--delta", c.delta, "Depreciation per period");
}

void add_shock(CLI::App* sub, RunConfig& c) {
  sub->add_option("--eta", c.eta, "Elasticity of net capital formation to its price");
  sub->add_option("--next-capital", c.next_capital, "Observed capital stock one period ahead, to measure eta");
  sub->add_option("--shock-size", c.shock_size, "Injection size in units of nominal output");
  sub->add_option("--outer-tolerance", c.outer_tolerance, "Relative tolerance of the quantity loop");
  sub->add_option("--max-outer-iterations", c.max_outer_iterations, "Quantity loop iteration cap");
  sub->add_option("--systems", c.systems, "Production systems to compare")
      ->check(CLI::IsMember({"ces", "cobb_douglas", "leontief"}))
      ->delimiter(',');
  sub->add_option("--classification", c.classification, "sector_id,label CSV attached to the ranking");
  sub->add_flag("--outcomes", c.outcomes, "Write one outcome JSON per shocked sector");
}

void add_elasticities(CLI::App* sub, RunConfig& c) {
  sub->add_option("--period", c.elasticity_period, "Price period of the elasticities")->check(CLI::Range(0, 1));
}

void add_generate(CLI::App* sub, RunConfig& c) {
  auto& g = c.generator;
  sub->add_option("-n,--sectors", c.n_sectors, "Number of sectors")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--density", g.density, "Probability of a permitted off-diagonal flow")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--max-mean-inputs", g.max_mean_inputs, "Cap on expected inputs per sector")->check(CLI::PositiveNumber);
  sub->add_option("--self-use", g.self_use, "Probability of a diagonal flow")->check(CLI::Range(0.0, 1.0));
  sub->add_flag("!--cyclic", g.acyclic, "Allow flows against the hidden order");
  sub->add_flag("--closure-order", g.closure_order, "Nest order from the transitive closure");
  sub->add_flag("!--unnormalized", g.normalized, "Do not set period 1 prices to one");
  sub->add_option("--gamma-min", g.gamma_min, "Lower bound of the nest exponents");
  sub->add_option("--gamma-max", g.gamma_max, "Upper bound of the nest exponents");
  sub->add_option("--tfp-growth", g.tfp_growth, "Bound of |ln(theta1 / theta0)|");
  sub->add_option("--factor-growth", g.factor_growth, "Bound of |ln(r1 / r0)| and |ln(w1 / w0)|");
  sub->add_option("--lambda", g.lambda, "Household CES exponent");
  sub->add_option("--max-retries", g.max_retries, "Redraw limit");
}

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "ccge: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Cascaded CES input-output model toolkit"};
  app.set_version_flag("--version", CCGE_VERSION);
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;
  std::function<void(const RunConfig&)> action;

  auto* generate = add_command(app, "generate", "Write a synthetic two-period economy and its generating values", config_path);
  add_output(generate, config);
  add_generate(generate, config);
  generate->callback([&] { action = cmd_generate; });

  auto* order = add_command(app, "order", "Derive the stream order", config_path);
  add_tables(order, config);
  add_output(order, config);
  add_ordering(order, config);
  order->callback([&] { action = cmd_order; });

  auto* calibrate = add_command(app, "calibrate", "Calibrate the cascaded CES technologies", config_path);
  add_tables(calibrate, config);
  add_output(calibrate, config);
  add_ordering(calibrate, config);
  calibrate->callback([&] { action = cmd_calibrate; });

  auto* solve = add_command(app, "solve", "Restore both periods and the halfway structure", config_path);
  add_tables(solve, config);
  add_output(solve, config);
  add_technology(solve, config);
  add_solver(solve, config);
  solve->callback([&] { action = cmd_solve; });

  auto* household = add_command(app, "household", "Estimate household preferences and capital-formation prices", config_path);
  add_tables(household, config);
  add_output(household, config);
  add_technology(household, config);
  add_household(household, config);
  household->callback([&] { action = cmd_household; });

  auto* shock = add_command(app, "shock", "Rank sectors by the effectiveness of a productivity injection", config_path);
  add_tables(shock, config);
  add_output(shock, config);
  add_technology(shock, config);
  add_solver(shock, config);
  add_household(shock, config);
  add_shock(shock, config);
  shock->callback([&] { action = cmd_shock; });

  auto* elasticities = add_command(app, "elasticities", "Allen-Uzawa and Morishima elasticity tables", config_path);
  add_tables(elasticities, config);
  add_output(elasticities, config);
  add_technology(elasticities, config);
  add_elasticities(elasticities, config);
  elasticities->callback([&] { action = cmd_elasticities; });

  auto* pipeline = add_command(app, "pipeline", "Run every stage into one directory", config_path);
  add_tables(pipeline, config);
  add_output(pipeline, config);
  add_technology(pipeline, config);
  add_solver(pipeline, config);
  add_household(pipeline, config);
  add_shock(pipeline, config);
  add_elasticities(pipeline, config);
  pipeline->callback([&] { action = cmd_pipeline; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!config_path.empty()) apply_config_file(*app.get_subcommands().front(), config_path);
    action(config);
  } catch (const ValidationError& e) {
    return report("invalid input", e, kExitValidation);
  } catch (const ConvergenceError& e) {
    return report("no convergence", e, kExitConvergence);
  } catch (const IoError& e) {
    return report("i/o error", e, kExitIo);
  } catch (const Error& e) {
    return report("error", e, kExitValidation);
  }
  return kExitOk;
}

}  // namespace ccge::cli
