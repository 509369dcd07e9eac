#include "serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ccge/errors.hpp"
#include "format.hpp"

namespace ccge::cli {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vector(const json& a) {
  const auto values = a.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json input_id(std::size_t input) { return input == kCapitalInput ? json("K") : json(input + 1); }

// JSON has no infinity; an unranked (never used) sector's ratio is written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json technology_to_json(const EconomyModel& model, const std::vector<CalibrationTrace>& traces) {
  json order = json::array();
  for (std::size_t k = 0; k < model.order.size(); ++k) {
    order.push_back({{"sector_id", model.order.permutation[k] + 1}, {"ratio", finite_or_null(model.order.ratios[k])}});
  }
  json sectors = json::array();
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& tech = model.technologies[j];
    json nests = json::array();
    for (const auto& nest : tech.nests) {
      nests.push_back({{"input", input_id(nest.input)},
                       {"alpha", nest.alpha},
                       {"gamma", nest.gamma},
                       {"form", to_string(nest.form)}});
    }
    json sector = {{"sector_id", j + 1}, {"theta0", tech.theta0}, {"theta1", tech.theta1}, {"nests", nests}};
    if (j < traces.size()) {
      sector["flagged"] = traces[j].flagged;
      sector["diagnostics"] = traces[j].diagnostics;
    }
    sectors.push_back(sector);
  }
  return {{"normalization_period", model.normalization_period},
          {"stream_order", order},
          {"triangularity_violations", model.order.triangularity_violations},
          {"sectors", sectors}};
}

EconomyModel technology_from_json(const json& doc) {
  try {
    EconomyModel model;
    model.normalization_period = doc.value("normalization_period", 1);
    const auto& sectors = doc.at("sectors");
    const std::size_t n = sectors.size();
    for (const auto& entry : doc.at("stream_order")) {
      const auto id = entry.at("sector_id").get<std::size_t>();
      if (id < 1 || id > n) throw ValidationError("stream order sector id out of range");
      model.order.permutation.push_back(id - 1);
      const auto& ratio = entry.at("ratio");
      model.order.ratios.push_back(ratio.is_null() ? std::numeric_limits<double>::infinity() : ratio.get<double>());
      model.order.ranking_index.push_back(static_cast<double>(n - model.order.ranking_index.size()) /
                                          static_cast<double>(n));
    }
    model.order.triangularity_violations = doc.value("triangularity_violations", std::size_t{0});
    for (const auto& s : sectors) {
      SectorTechnology tech;
      tech.sector = s.at("sector_id").get<std::size_t>() - 1;
      tech.theta0 = s.at("theta0").get<double>();
      tech.theta1 = s.at("theta1").get<double>();
      for (const auto& nj : s.at("nests")) {
        NestParams nest;
        const auto& input = nj.at("input");
        nest.input = input.is_string() ? kCapitalInput : input.get<std::size_t>() - 1;
        if (input.is_string() && input.get<std::string>() != "K") throw ValidationError("unknown nest input");
        nest.alpha = nj.at("alpha").get<double>();
        nest.gamma = nj.at("gamma").get<double>();
        nest.form = nest_form_from_string(nj.at("form").get<std::string>());
        tech.nests.push_back(nest);
      }
      model.technologies.push_back(std::move(tech));
    }
    if (model.order.size() != n) throw ValidationError("stream order must list every sector");
    validate_model(model);
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("technology: ") + e.what());
  }
}

json preferences_to_json(const PreferenceRecord& record) {
  const auto& p = record.preferences;
  json doc = {{"mu", vec(p.mu)},
              {"lambda", p.lambda},
              {"lambda_source", record.lambda_source},
              {"beta", p.beta},
              {"delta", p.delta}};
  if (record.capital_prices) {
    doc["s_rho"] = {record.capital_prices->s_rho[0], record.capital_prices->s_rho[1]};
    doc["s_rho_negative"] = record.capital_prices->negative;
  }
  return doc;
}

PreferenceRecord preferences_from_json(const json& doc) {
  try {
    PreferenceRecord record;
    record.preferences.mu = to_vector(doc.at("mu"));
    record.preferences.lambda = doc.at("lambda").get<double>();
    record.preferences.beta = doc.value("beta", kDefaultBeta);
    record.preferences.delta = doc.value("delta", kDefaultDelta);
    record.lambda_source = doc.value("lambda_source", std::string("configured"));
    validate_preferences(record.preferences);
    return record;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("preferences: ") + e.what());
  }
}

json report_to_json(const EstimationReport& r) {
  return {{"status", "estimated"},
          {"observations", r.observations},
          {"lambda_hat", r.lambda_hat},
          {"lambda_se", r.lambda_se},
          {"intercept", r.intercept},
          {"intercept_se", r.intercept_se},
          {"ols_lambda", r.ols_lambda},
          {"ols_intercept", r.ols_intercept},
          {"first_stage_f", r.first_stage_f},
          {"first_stage_df", {r.first_stage_df1, r.first_stage_df2}},
          {"durbin_chi2", r.durbin_chi2},
          {"wu_hausman_f", r.wu_hausman_f},
          {"sargan_chi2", r.sargan_chi2},
          {"basmann_chi2", r.basmann_chi2},
          {"weights", vec(r.weights)},
          {"warnings", r.warnings}};
}

json baseline_to_json(const Baseline& b) {
  return {{"consumption", b.consumption},
          {"labor", b.labor},
          {"capital", b.capital},
          {"net_exports", b.net_exports},
          {"formation_total", b.formation_total},
          {"price_index", b.price_index},
          {"r", b.r},
          {"w", b.w},
          {"s_rho", {b.capital_prices.s_rho[0], b.capital_prices.s_rho[1]}},
          {"net_formation", {b.net_formation0, b.net_formation1}},
          {"eta", b.eta},
          {"eta_measured", b.eta_measured}};
}

json outcome_to_json(const CounterfactualOutcome& o) {
  json doc = {{"system", to_string(o.system)},
              {"theta", vec(o.theta)},
              {"p", vec(o.p)},
              {"price_index", o.price_index},
              {"s_rho", o.capital_price_level},
              {"net_formation", o.net_formation},
              {"next_capital", o.next_capital},
              {"formation_total", o.formation_total},
              {"consumption", o.consumption},
              {"labor", o.labor},
              {"capital", o.capital},
              {"net_exports", o.net_exports},
              {"r", o.r},
              {"w", o.w},
              {"household_nominal", vec(o.household_nominal)},
              {"formation_nominal", vec(o.formation_nominal)},
              {"output_nominal", vec(o.output_nominal)},
              {"benefit", o.benefit},
              {"cost", o.cost},
              {"welfare_gain", o.welfare_gain},
              {"effectiveness", o.effectiveness},
              {"leontief_residual", o.leontief_residual},
              {"converged", o.converged},
              {"iterations", o.iterations},
              {"price_iterations", o.price_iterations}};
  if (o.shocked_sector) doc["sector_id"] = *o.shocked_sector + 1;
  return doc;
}

json truth_to_json(const SyntheticEconomy& e) {
  json hidden = json::array();
  for (const auto i : e.hidden_order) hidden.push_back(i + 1);
  return {{"technology", technology_to_json(e.model)},
          {"hidden_order", hidden},
          {"lambda", e.preferences.lambda},
          {"mu", vec(e.preferences.mu)},
          {"beta", e.preferences.beta},
          {"delta", e.preferences.delta},
          {"s_rho", {e.capital_price_levels[0], e.capital_price_levels[1]}},
          {"next_capital", e.next_capital},
          {"tfp_growth", vec(e.tfp_growth)},
          {"attempts", e.attempts}};
}

}  // namespace ccge::cli
