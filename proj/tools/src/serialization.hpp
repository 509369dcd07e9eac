#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ccge/calibration.hpp"
#include "ccge/counterfactual.hpp"
#include "ccge/equilibrium.hpp"
#include "ccge/household.hpp"
#include "ccge/synthetic.hpp"
#include "json.hpp"

namespace ccge::cli {

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// technology.json: stream order plus per-sector nests (1-based ids, "K" for capital).
nlohmann::json technology_to_json(const EconomyModel& model, const std::vector<CalibrationTrace>& traces = {});
EconomyModel technology_from_json(const nlohmann::json& doc);

/// Where the lambda in use came from: "configured", "estimated" or "default".
struct PreferenceRecord {
  HouseholdPreferences preferences;
  std::string lambda_source = "default";
  std::optional<CapitalPrices> capital_prices;
};

nlohmann::json preferences_to_json(const PreferenceRecord& record);
PreferenceRecord preferences_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const EstimationReport& report);
nlohmann::json baseline_to_json(const Baseline& baseline);
nlohmann::json outcome_to_json(const CounterfactualOutcome& outcome);
nlohmann::json truth_to_json(const SyntheticEconomy& economy);

}  // namespace ccge::cli
