#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>

#include "ccge/calibration.hpp"
#include "ccge/ces_core.hpp"
#include "ccge/counterfactual.hpp"
#include "ccge/csv.hpp"
#include "ccge/equilibrium.hpp"
#include "ccge/errors.hpp"
#include "ccge/iot_data.hpp"
#include "ccge/stream_order.hpp"
#include "format.hpp"
#include "manifest.hpp"
#include "serialization.hpp"

namespace ccge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

IncidenceSource parse_incidence(const std::string& name) {
  if (name == "period0") return IncidenceSource::Period0;
  if (name == "period1") return IncidenceSource::Period1;
  if (name == "union") return IncidenceSource::Union;
  throw ValidationError("unknown incidence source '" + name + "' (expected period0, period1 or union)");
}

std::string id(std::size_t index) { return std::to_string(index + 1); }

/// Lazily computed pipeline state shared by the stages of one command.
class Session {
 public:
  Session(const RunConfig& config, Manifest& manifest) : config_(config), manifest_(manifest) {}

  const RunConfig& config() const { return config_; }

  SolverOptions solver() const { return {config_.tolerance, config_.max_iterations, config_.damping}; }

  const LinkedIOTables& tables() {
    if (!tables_) {
      if (config_.input.empty()) throw ValidationError("--input is required");
      auto loaded = load_tables(config_.input, {config_.balance_tolerance, config_.balance_warning});
      for (const auto& name : table_file_names()) manifest_.add_input(config_.input / name);
      for (const auto& w : loaded.balance.warnings) manifest_.warn(w);
      tables_ = normalize_prices(loaded.tables, config_.normalization_period);
    }
    return *tables_;
  }

  const StreamOrder& order() {
    if (!config_.technology.empty()) return model().order;
    if (!order_) {
      auto incidence = build_incidence(tables(), parse_incidence(config_.incidence));
      if (config_.closure) incidence = transitive_closure(incidence);
      order_ = derive_stream_order(incidence);
    }
    return *order_;
  }

  const EconomyModel& model() {
    if (!model_) {
      if (!config_.technology.empty()) {
        model_ = technology_from_json(read_json(config_.technology));
        manifest_.add_input(config_.technology);
        if (model_->size() != tables().n_sectors()) throw ValidationError("technology and tables differ in sector count");
      } else {
        auto calibration = calibrate_economy(tables(), order());
        model_ = std::move(calibration.model);
        traces_ = std::move(calibration.traces);
      }
    }
    return *model_;
  }

  const std::vector<CalibrationTrace>& traces() {
    model();
    return traces_;
  }

  const PreferenceRecord& preferences() {
    if (!preferences_) compute_preferences();
    return *preferences_;
  }

  const std::optional<EstimationReport>& report() {
    preferences();
    return report_;
  }
  const std::string& report_error() {
    preferences();
    return report_error_;
  }

 private:
  ExpenditurePanel panel_from_tables() {
    const auto& t = tables();
    const Eigen::VectorXd b0 = budget_shares(t[0]);
    const Eigen::VectorXd b1 = budget_shares(t[1]);
    const Eigen::VectorXd theta_growth = (model().theta(1).array() / model().theta(0).array()).log().matrix();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < b0.size(); ++i) {
      if (b0(i) > 0.0 && b1(i) > 0.0) keep.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(keep.size());
    ExpenditurePanel panel{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m),
                           Eigen::VectorXd(m)};
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto i = keep[static_cast<std::size_t>(k)];
      panel.b0(k) = b0(i);
      panel.b1(k) = b1(i);
      panel.p0(k) = t[0].price(i);
      panel.p1(k) = t[1].price(i);
      panel.instrument(k) = theta_growth(i);
    }
    return panel;
  }

  ExpenditurePanel panel_from_file() {
    const auto rows = csv::read(config_.panel, {"commodity_id", "b0", "b1", "p0", "p1", "dln_theta"});
    manifest_.add_input(config_.panel);
    const auto m = static_cast<Eigen::Index>(rows.size());
    ExpenditurePanel panel{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m),
                           Eigen::VectorXd(m)};
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto& row = rows[static_cast<std::size_t>(k)];
      panel.b0(k) = csv::to_double(row.cells[1], config_.panel, row.line);
      panel.b1(k) = csv::to_double(row.cells[2], config_.panel, row.line);
      panel.p0(k) = csv::to_double(row.cells[3], config_.panel, row.line);
      panel.p1(k) = csv::to_double(row.cells[4], config_.panel, row.line);
      panel.instrument(k) = csv::to_double(row.cells[5], config_.panel, row.line);
    }
    return panel;
  }

  void compute_preferences() {
    PreferenceRecord record;
    if (!config_.preferences.empty()) {
      record = preferences_from_json(read_json(config_.preferences));
      manifest_.add_input(config_.preferences);
      if (static_cast<std::size_t>(record.preferences.mu.size()) != tables().n_sectors()) {
        throw ValidationError("preferences and tables differ in commodity count");
      }
    } else {
      try {
        report_ = estimate_lambda(config_.panel.empty() ? panel_from_tables() : panel_from_file());
        for (const auto& w : report_->warnings) manifest_.warn("household: " + w);
      } catch (const ValidationError& e) {
        report_error_ = e.what();
      }
      double lambda = kDefaultLambda;
      if (config_.lambda) {
        lambda = *config_.lambda;
        record.lambda_source = "configured";
      } else if (report_) {
        lambda = report_->lambda_hat;
        record.lambda_source = "estimated";
      } else {
        manifest_.warn("household: lambda not estimable (" + report_error_ + "), default used");
      }
      record.preferences = preferences_from_tables(tables(), lambda, config_.beta, config_.delta);
    }
    const auto& t = tables();
    const auto& prefs = record.preferences;
    record.capital_prices = recover_capital_prices(aggregate_accounts(t), prefs, price_index(t[0].price, prefs),
                                                   price_index(t[1].price, prefs));
    if (record.capital_prices->negative) manifest_.warn("household: recovered capital-formation price is not positive");
    preferences_ = std::move(record);
  }

  const RunConfig& config_;
  Manifest& manifest_;
  std::optional<LinkedIOTables> tables_;
  std::optional<StreamOrder> order_;
  std::optional<EconomyModel> model_;
  std::vector<CalibrationTrace> traces_;
  std::optional<PreferenceRecord> preferences_;
  std::optional<EstimationReport> report_;
  std::string report_error_;
};

using Stage = std::pair<std::string, std::function<void(Session&, Manifest&, const fs::path&)>>;

void stage_order(Session& s, Manifest& m, const fs::path& dir) {
  const auto& order = s.order();
  CsvWriter so(dir / "stream_order.csv");
  so.row({"rank", "sector_id", "ratio", "ranking_index"});
  for (std::size_t k = 0; k < order.size(); ++k) {
    so.row({std::to_string(k + 1), id(order.permutation[k]), num(order.ratios[k]), num(order.ranking_index[k])});
  }
  so.close();
  m.add_output(dir / "stream_order.csv");

  CsvWriter cc(dir / "ccdf.csv");
  cc.row({"rank", "sector_id", "ratio", "ranking_index", "log_ratio", "log_ranking_index"});
  for (const auto& pt : ccdf_export(order)) {
    cc.row({std::to_string(pt.rank), id(pt.sector), num(pt.ratio), num(pt.ranking_index), num(pt.log_ratio),
            num(pt.log_ranking_index)});
  }
  cc.close();
  m.add_output(dir / "ccdf.csv");
  if (order.triangularity_violations > 0) {
    m.warn("order: " + std::to_string(order.triangularity_violations) + " incidence entries violate triangularity");
  }
}

void stage_calibrate(Session& s, Manifest& m, const fs::path& dir) {
  const auto& model = s.model();
  const auto& traces = s.traces();
  write_json(dir / "technology.json", technology_to_json(model, traces));
  m.add_output(dir / "technology.json");
  for (std::size_t j = 0; j < traces.size(); ++j) {
    for (const auto& d : traces[j].diagnostics) m.warn("calibrate: sector " + id(j) + ": " + d);
  }

  const auto& tables = s.tables();
  const auto prices = period_prices(tables);
  const auto shares = compute_cost_shares(tables);
  CsvWriter out(dir / "tfp.csv");
  out.row({"sector", "tfpg_cces", "tfpg_tornqvist"});
  for (std::size_t j = 0; j < model.size(); ++j) {
    out.row({id(j), num(tfp_growth(model.technologies[j], prices)), num(tornqvist_tfpg(shares, prices, j))});
  }
  out.close();
  m.add_output(dir / "tfp.csv");
}

void write_state(const EquilibriumState& state, const fs::path& dir, const std::string& tag, Manifest& m) {
  const auto n = state.p.size();
  CsvWriter eq(dir / ("equilibrium_" + tag + ".csv"));
  eq.row({"sector", "price", "theta", "a_K", "a_L"});
  for (Eigen::Index j = 0; j < n; ++j) {
    eq.row({std::to_string(j + 1), num(state.p(j)), num(state.theta(j)), num(state.a_K(j)), num(state.a_L(j))});
  }
  eq.close();
  m.add_output(dir / ("equilibrium_" + tag + ".csv"));

  CsvWriter a(dir / ("A_" + tag + ".csv"));
  std::vector<std::string> header{"input_id"};
  for (Eigen::Index j = 0; j < n; ++j) header.push_back(std::to_string(j + 1));
  a.row(header);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (Eigen::Index j = 0; j < n; ++j) row.push_back(num(state.A(i, j)));
    a.row(row);
  }
  a.close();
  m.add_output(dir / ("A_" + tag + ".csv"));
}

void stage_solve(Session& s, Manifest& m, const fs::path& dir) {
  const auto& model = s.model();
  const auto& tables = s.tables();
  const auto factors = FactorPath::from_tables(tables);
  const auto states = restore_structures(model, factors, s.solver());
  const auto half = halfway_state(model, factors, s.solver());
  write_state(states[0], dir, "t0", m);
  write_state(states[1], dir, "t1", m);
  write_state(half.state, dir, "thalf", m);

  CsvWriter hw(dir / "halfway.csv");
  hw.row({"sector", "a_L0", "a_Lhalf", "a_L1", "growth_half", "growth_full"});
  const auto full = labor_intensity_growth(states[0].a_L, states[1].a_L);
  for (Eigen::Index j = 0; j < half.state.p.size(); ++j) {
    hw.row({std::to_string(j + 1), num(states[0].a_L(j)), num(half.state.a_L(j)), num(states[1].a_L(j)),
            num(half.labor_intensity_growth(j)), num(full(j))});
  }
  hw.close();
  m.add_output(dir / "halfway.csv");

  const auto shares = compute_cost_shares(tables);
  json periods = json::array();
  bool restored = true;
  for (int t = 0; t < kPeriods; ++t) {
    const auto& st = states[static_cast<std::size_t>(t)];
    const double share_error = std::max({(st.A - shares.a[t]).cwiseAbs().maxCoeff(),
                                         (st.a_K - shares.a_K[t]).cwiseAbs().maxCoeff(),
                                         (st.a_L - shares.a_L[t]).cwiseAbs().maxCoeff()});
    const double price_error = ((st.p - tables[t].price).array() / tables[t].price.array()).abs().maxCoeff();
    restored = restored && share_error < 1e-8 && price_error < 1e-8;
    periods.push_back({{"t", t},
                       {"max_share_error", share_error},
                       {"max_price_error", price_error},
                       {"iterations", st.iterations},
                       {"residual", st.residual}});
  }
  write_json(dir / "restoration.json", {{"restored", restored}, {"tolerance", 1e-8}, {"periods", periods}});
  m.add_output(dir / "restoration.json");
  if (!restored) m.warn("solve: restored structures deviate from the observed tables by more than 1e-8");
}

void stage_household(Session& s, Manifest& m, const fs::path& dir) {
  write_json(dir / "preferences.json", preferences_to_json(s.preferences()));
  m.add_output(dir / "preferences.json");
  json report;
  if (s.report()) {
    report = report_to_json(*s.report());
  } else if (!s.config().preferences.empty()) {
    report = {{"status", "skipped"}, {"reason", "preferences supplied"}};
  } else {
    report = {{"status", "unavailable"}, {"reason", s.report_error()}};
  }
  report["lambda_used"] = s.preferences().preferences.lambda;
  report["lambda_source"] = s.preferences().lambda_source;
  write_json(dir / "estimation_report.json", report);
  m.add_output(dir / "estimation_report.json");
}

std::vector<std::string> read_classification(const fs::path& path, std::size_t n, Manifest& m) {
  if (path.empty()) return {};
  const auto rows = csv::read(path, {"sector_id", "label"});
  m.add_input(path);
  std::vector<std::string> labels(n);
  for (const auto& row : rows) {
    const long k = csv::to_int(row.cells[0], path, row.line);
    if (k < 1 || static_cast<std::size_t>(k) > n) throw ValidationError(path.string() + ": sector id out of range");
    labels[static_cast<std::size_t>(k - 1)] = row.cells[1];
  }
  return labels;
}

void stage_shock(Session& s, Manifest& m, const fs::path& dir) {
  const auto& config = s.config();
  const auto& model = s.model();
  const auto& prefs = s.preferences().preferences;

  CounterfactualConfig cc;
  cc.shock_size = config.shock_size;
  cc.eta = config.eta;
  cc.next_capital = config.next_capital;
  cc.max_outer_iterations = config.max_outer_iterations;
  cc.outer_tolerance = config.outer_tolerance;
  cc.solver = s.solver();
  const auto baseline = make_baseline(model, s.tables(), prefs, cc);
  write_json(dir / "baseline.json", baseline_to_json(baseline));
  m.add_output(dir / "baseline.json");

  SweepOptions options;
  options.systems.clear();
  for (const auto& name : config.systems) options.systems.push_back(system_variant_from_string(name));
  options.classification = read_classification(config.classification, model.size(), m);
  const auto sweep = run_shock_sweep(model, prefs, baseline, cc, options);

  auto entries = sweep.entries;
  std::map<SystemVariant, std::size_t> system_rank;
  for (std::size_t k = 0; k < options.systems.size(); ++k) system_rank.emplace(options.systems[k], k);
  std::stable_sort(entries.begin(), entries.end(), [&](const SweepEntry& a, const SweepEntry& b) {
    if (a.system != b.system) return system_rank[a.system] < system_rank[b.system];
    const auto ra = a.effectiveness_rank == 0 ? SIZE_MAX : a.effectiveness_rank;
    const auto rb = b.effectiveness_rank == 0 ? SIZE_MAX : b.effectiveness_rank;
    return ra < rb;
  });

  CsvWriter out(dir / "effectiveness.csv");
  out.row({"sector", "system", "welfare_gain", "effectiveness", "effectiveness_rank", "stream_rank", "classification"});
  std::map<SystemVariant, std::pair<std::size_t, std::size_t>> negatives;
  for (const auto& e : entries) {
    const double gain = e.outcome ? e.outcome->welfare_gain : std::nan("");
    const double eff = e.outcome ? e.outcome->effectiveness : std::nan("");
    out.row({id(e.sector), to_string(e.system), num(gain), num(eff), std::to_string(e.effectiveness_rank),
             std::to_string(e.stream_rank), e.classification});
    if (!e.outcome) {
      m.warn("shock: sector " + id(e.sector) + " (" + to_string(e.system) + "): " + e.error);
      continue;
    }
    auto& [neg, total] = negatives[e.system];
    ++total;
    if (e.outcome->welfare_gain < 0.0) ++neg;
    if (config.outcomes && e.system == SystemVariant::Ces) {
      const auto path = dir / ("outcome_" + id(e.sector) + ".json");
      write_json(path, outcome_to_json(*e.outcome));
      m.add_output(path);
    }
  }
  out.close();
  m.add_output(dir / "effectiveness.csv");
  for (const auto& [system, count] : negatives) {
    if (count.first > 0) {
      m.warn("shock: " + to_string(system) + ": " + std::to_string(count.first) + " of " + std::to_string(count.second) +
             " marginal shocks yield a negative welfare gain");
    }
  }
}

void stage_elasticities(Session& s, Manifest& m, const fs::path& dir) {
  const int period = s.config().elasticity_period;
  if (period < 0 || period >= kPeriods) throw ValidationError("elasticity period must be 0 or 1");
  const auto& model = s.model();
  const auto prices = period_prices(s.tables())[static_cast<std::size_t>(period)];
  const auto sub = dir / "elasticities";
  fs::create_directories(sub);

  CsvWriter lng(dir / "elasticities.csv");
  lng.row({"sector", "row", "column", "aues", "mes"});
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& tech = model.technologies[j];
    const auto e = elasticity_tables(tech, prices);
    const auto size = cascade_size(tech);
    // Outermost input first, labor last.
    std::vector<std::size_t> positions(size);
    for (std::size_t k = 0; k < size; ++k) positions[k] = size - 1 - k;

    std::vector<std::string> header{"input"};
    for (const auto p : positions) header.push_back(position_label(tech, p));
    CsvWriter au(sub / ("aues_" + id(j) + ".csv"));
    CsvWriter me(sub / ("mes_" + id(j) + ".csv"));
    au.row(header);
    me.row(header);
    for (const auto r : positions) {
      std::vector<std::string> arow{position_label(tech, r)};
      std::vector<std::string> mrow{position_label(tech, r)};
      for (const auto c : positions) {
        const auto ri = static_cast<Eigen::Index>(r);
        const auto ci = static_cast<Eigen::Index>(c);
        arow.push_back(r == c ? "" : num(e.aues(ri, ci)));
        mrow.push_back(r == c ? "" : num(e.mes(ri, ci)));
        if (r != c) {
          lng.row({id(j), position_label(tech, r), position_label(tech, c), num(e.aues(ri, ci)), num(e.mes(ri, ci))});
        }
      }
      au.row(arow);
      me.row(mrow);
    }
    au.close();
    me.close();
    m.add_output(sub / ("aues_" + id(j) + ".csv"));
    m.add_output(sub / ("mes_" + id(j) + ".csv"));
  }
  lng.close();
  m.add_output(dir / "elasticities.csv");
}

void prepare_output(const fs::path& dir) {
  if (dir.empty()) throw ValidationError("--output is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void run_stages(const RunConfig& config, const std::string& command, const std::vector<Stage>& stages) {
  prepare_output(config.output);
  Manifest manifest(command);
  manifest.set_config(config_json(config, command));
  Session session(config, manifest);
  for (const auto& [name, fn] : stages) {
    auto fail = [&](const std::string& what) {
      manifest.write(config.output, false, name, what);
      return name + ": " + what;
    };
    try {
      fn(session, manifest, config.output);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(fail(e.what()), e.iterations(), e.residual());
    } catch (const IoError& e) {
      throw IoError(fail(e.what()));
    } catch (const ValidationError& e) {
      throw ValidationError(fail(e.what()));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fail(e.what()));
    }
  }
  manifest.write(config.output, true);
}

}  // namespace

json config_json(const RunConfig& c, const std::string& command) {
  json doc = {{"input", c.input.generic_string()},
              {"normalization_period", c.normalization_period},
              {"balance_tolerance", c.balance_tolerance},
              {"balance_warning", c.balance_warning},
              {"tolerance", c.tolerance},
              {"max_iterations", c.max_iterations},
              {"damping", c.damping}};
  if (command == "generate") {
    const auto& g = c.generator;
    return {{"n", c.n_sectors},
            {"seed", c.seed},
            {"density", g.density},
            {"max_mean_inputs", g.max_mean_inputs},
            {"self_use", g.self_use},
            {"acyclic", g.acyclic},
            {"closure_order", g.closure_order},
            {"normalized", g.normalized},
            {"gamma_range", {g.gamma_min, g.gamma_max}},
            {"tfp_growth", g.tfp_growth},
            {"factor_growth", g.factor_growth},
            {"lambda", g.lambda},
            {"max_retries", g.max_retries}};
  }
  doc["incidence"] = c.incidence;
  doc["closure"] = c.closure;
  doc["technology"] = c.technology.generic_string();
  doc["preferences"] = c.preferences.generic_string();
  doc["panel"] = c.panel.generic_string();
  doc["lambda"] = optional_json(c.lambda);
  doc["beta"] = c.beta;
  doc["delta"] = c.delta;
  doc["eta"] = optional_json(c.eta);
  doc["next_capital"] = optional_json(c.next_capital);
  doc["shock_size"] = c.shock_size;
  doc["outer_tolerance"] = c.outer_tolerance;
  doc["max_outer_iterations"] = c.max_outer_iterations;
  doc["systems"] = c.systems;
  doc["classification"] = c.classification.generic_string();
  doc["outcomes"] = c.outcomes;
  doc["elasticity_period"] = c.elasticity_period;
  return doc;
}

void cmd_generate(const RunConfig& config) {
  prepare_output(config.output);
  Manifest manifest("generate");
  manifest.set_config(config_json(config, "generate"));
  const auto economy = generate_synthetic_economy(config.n_sectors, config.seed, config.generator);
  write_tables(economy.tables, config.output);
  for (const auto& name : table_file_names()) manifest.add_output(config.output / name);
  write_json(config.output / "truth.json", truth_to_json(economy));
  manifest.add_output(config.output / "truth.json");
  manifest.write(config.output, true);
}

void cmd_order(const RunConfig& config) { run_stages(config, "order", {{"order", stage_order}}); }

void cmd_calibrate(const RunConfig& config) { run_stages(config, "calibrate", {{"calibrate", stage_calibrate}}); }

void cmd_solve(const RunConfig& config) { run_stages(config, "solve", {{"solve", stage_solve}}); }

void cmd_household(const RunConfig& config) { run_stages(config, "household", {{"household", stage_household}}); }

void cmd_shock(const RunConfig& config) { run_stages(config, "shock", {{"shock", stage_shock}}); }

void cmd_elasticities(const RunConfig& config) {
  run_stages(config, "elasticities", {{"elasticities", stage_elasticities}});
}

void cmd_pipeline(const RunConfig& config) {
  run_stages(config, "pipeline",
             {{"order", stage_order},
              {"calibrate", stage_calibrate},
              {"solve", stage_solve},
              {"household", stage_household},
              {"shock", stage_shock},
              {"elasticities", stage_elasticities}});
}

}  // namespace ccge::cli
