#include "ccge/iot_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccge/errors.hpp"
#include "ccge/csv.hpp"

namespace ccge {

namespace fs = std::filesystem;

namespace {

std::string period_file(const char* stem, int t) {
  return std::string(stem) + "_t" + std::to_string(t) + ".csv";
}

std::string sector_label(Eigen::Index j) { return "sector " + std::to_string(j + 1); }

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_shapes(const LinkedIOTables& tables) {
  const auto n = static_cast<Eigen::Index>(tables.n_sectors());
  if (n < 1) throw ValidationError("tables have no sectors");
  for (int t = 0; t < kPeriods; ++t) {
    const auto& p = tables[t];
    const bool ok = p.flows.rows() == n && p.flows.cols() == n && p.output_nominal.size() == n &&
                    p.price.size() == n && p.capital.size() == n && p.labor.size() == n &&
                    p.household.size() == n && p.capital_formation.size() == n &&
                    p.net_exports.size() == n;
    if (!ok) throw ValidationError("period " + std::to_string(t) + " arrays do not match n_sectors");
  }
}

}  // namespace

BalanceReport validate_tables(const LinkedIOTables& tables, const ValidationOptions& options) {
  check_shapes(tables);
  const auto n = static_cast<Eigen::Index>(tables.n_sectors());
  BalanceReport report;

  auto note = [&](double residual, const std::string& what) {
    if (residual > options.error_tolerance) {
      std::ostringstream os;
      os << what << " residual " << residual << " exceeds tolerance " << options.error_tolerance;
      throw ValidationError(os.str());
    }
    if (residual > options.warning_tolerance) {
      std::ostringstream os;
      os << what << " residual " << residual;
      report.warnings.push_back(os.str());
    }
  };

  for (int t = 0; t < kPeriods; ++t) {
    const auto& pt = tables[t];
    const std::string tag = " (t=" + std::to_string(t) + ")";
    if (!positive_finite(pt.wage) || !positive_finite(pt.capital_price)) {
      throw ValidationError("factor prices must be strictly positive" + tag);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!positive_finite(pt.price(i))) throw ValidationError(sector_label(i) + ": non-positive price" + tag);
      if (!(pt.capital(i) >= 0.0) || !(pt.labor(i) >= 0.0) || !(pt.output_nominal(i) >= 0.0)) {
        throw ValidationError(sector_label(i) + ": negative primary input or output" + tag);
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!(pt.flows(i, j) >= 0.0) || !std::isfinite(pt.flows(i, j))) {
          throw ValidationError("negative flow from commodity " + std::to_string(i + 1) + " to " +
                                sector_label(j) + tag);
        }
      }
    }

    const Eigen::VectorXd real_output = pt.real_output();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double cost = pt.capital_price * pt.capital(j) + pt.wage * pt.labor(j) +
                          pt.price.dot(pt.flows.col(j));
      const double scale = std::max(pt.output_nominal(j), 1e-300);
      const double residual = std::abs(cost - pt.output_nominal(j)) / scale;
      report.max_row_residual = std::max(report.max_row_residual, residual);
      note(residual, sector_label(j) + ": cost balance" + tag);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double use = pt.household(i) + pt.capital_formation(i) + pt.net_exports(i) + pt.flows.row(i).sum();
      const double scale = std::max(std::abs(real_output(i)), 1e-300);
      const double residual = std::abs(use - real_output(i)) / scale;
      report.max_column_residual = std::max(report.max_column_residual, residual);
      note(residual, "commodity " + std::to_string(i + 1) + ": demand balance" + tag);
    }
    const double value_added = pt.capital_price * pt.capital.sum() + pt.wage * pt.labor.sum();
    const double final_demand = pt.price.dot(pt.household + pt.capital_formation + pt.net_exports);
    const double aggregate = std::abs(value_added - final_demand) / std::max(std::abs(value_added), 1e-300);
    report.aggregate_residual = std::max(report.aggregate_residual, aggregate);
    note(aggregate, "aggregate value added vs final demand" + tag);
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if ((tables[0].flows(i, j) > 0.0) != (tables[1].flows(i, j) > 0.0)) {
        throw ValidationError("sparsity mismatch: flow from commodity " + std::to_string(i + 1) + " to " +
                              sector_label(j) + " is positive in only one period");
      }
    }
    if ((tables[0].capital(i) > 0.0) != (tables[1].capital(i) > 0.0)) {
      throw ValidationError(sector_label(i) + ": capital input is positive in only one period");
    }
  }
  return report;
}

std::vector<std::string> table_file_names() {
  std::vector<std::string> names;
  for (int t = 0; t < kPeriods; ++t) {
    names.push_back(period_file("flows", t));
    names.push_back(period_file("primary", t));
    names.push_back(period_file("final", t));
  }
  names.emplace_back("factors.csv");
  return names;
}

LoadedTables load_tables(const fs::path& dir, const ValidationOptions& options) {
  for (const auto& name : table_file_names()) {
    if (!fs::exists(dir / name)) throw IoError("missing input file " + (dir / name).string());
  }

  LinkedIOTables tables;
  Eigen::Index n = 0;
  {
    const auto path = dir / period_file("primary", 0);
    n = static_cast<Eigen::Index>(csv::read(path, {"sector_id", "K", "L", "Y_nominal"}).size());
    if (n == 0) throw ValidationError(path.string() + ": no sectors");
  }

  auto index_of = [n](long id, const fs::path& path, std::size_t line) {
    if (id < 1 || id > n) {
      throw ValidationError(path.string() + ":" + std::to_string(line) + ": id " + std::to_string(id) +
                            " outside 1.." + std::to_string(n));
    }
    return static_cast<Eigen::Index>(id - 1);
  };

  for (int t = 0; t < kPeriods; ++t) {
    auto& pt = tables[t];
    pt.flows = Eigen::MatrixXd::Zero(n, n);
    pt.output_nominal = pt.price = pt.capital = pt.labor = Eigen::VectorXd::Constant(n, std::nan(""));
    pt.household = pt.capital_formation = pt.net_exports = Eigen::VectorXd::Constant(n, std::nan(""));

    const auto flows_path = dir / period_file("flows", t);
    for (const auto& row : csv::read(flows_path, {"input_id", "sector_id", "value"})) {
      const auto i = index_of(csv::to_int(row.cells[0], flows_path, row.line), flows_path, row.line);
      const auto j = index_of(csv::to_int(row.cells[1], flows_path, row.line), flows_path, row.line);
      pt.flows(i, j) += csv::to_double(row.cells[2], flows_path, row.line);
    }

    const auto primary_path = dir / period_file("primary", t);
    const auto primary = csv::read(primary_path, {"sector_id", "K", "L", "Y_nominal"});
    if (static_cast<Eigen::Index>(primary.size()) != n) {
      throw ValidationError(primary_path.string() + ": expected " + std::to_string(n) + " sectors");
    }
    for (const auto& row : primary) {
      const auto j = index_of(csv::to_int(row.cells[0], primary_path, row.line), primary_path, row.line);
      pt.capital(j) = csv::to_double(row.cells[1], primary_path, row.line);
      pt.labor(j) = csv::to_double(row.cells[2], primary_path, row.line);
      pt.output_nominal(j) = csv::to_double(row.cells[3], primary_path, row.line);
    }

    const auto final_path = dir / period_file("final", t);
    const auto final_rows = csv::read(final_path, {"commodity_id", "H", "G", "E", "price"});
    if (static_cast<Eigen::Index>(final_rows.size()) != n) {
      throw ValidationError(final_path.string() + ": expected " + std::to_string(n) + " commodities");
    }
    for (const auto& row : final_rows) {
      const auto i = index_of(csv::to_int(row.cells[0], final_path, row.line), final_path, row.line);
      pt.household(i) = csv::to_double(row.cells[1], final_path, row.line);
      pt.capital_formation(i) = csv::to_double(row.cells[2], final_path, row.line);
      pt.net_exports(i) = csv::to_double(row.cells[3], final_path, row.line);
      pt.price(i) = csv::to_double(row.cells[4], final_path, row.line);
    }
    if (!pt.capital.allFinite() || !pt.labor.allFinite() || !pt.output_nominal.allFinite()) {
      throw ValidationError(primary_path.string() + ": duplicate or missing sector rows");
    }
    if (!pt.price.allFinite() || !pt.household.allFinite()) {
      throw ValidationError(final_path.string() + ": duplicate or missing commodity rows");
    }
  }

  const auto factors_path = dir / "factors.csv";
  std::array<bool, kPeriods> seen{};
  for (const auto& row : csv::read(factors_path, {"t", "r", "w"})) {
    const long t = csv::to_int(row.cells[0], factors_path, row.line);
    if (t < 0 || t >= kPeriods) throw ValidationError(factors_path.string() + ": period must be 0 or 1");
    tables[static_cast<int>(t)].capital_price = csv::to_double(row.cells[1], factors_path, row.line);
    tables[static_cast<int>(t)].wage = csv::to_double(row.cells[2], factors_path, row.line);
    seen[static_cast<std::size_t>(t)] = true;
  }
  if (!seen[0] || !seen[1]) throw ValidationError(factors_path.string() + ": both periods required");

  LoadedTables loaded{std::move(tables), {}};
  loaded.balance = validate_tables(loaded.tables, options);
  return loaded;
}

void write_tables(const LinkedIOTables& tables, const fs::path& dir) {
  check_shapes(tables);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  const auto n = static_cast<Eigen::Index>(tables.n_sectors());

  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    return out;
  };

  for (int t = 0; t < kPeriods; ++t) {
    const auto& pt = tables[t];
    {
      auto out = open(period_file("flows", t));
      out << "input_id,sector_id,value\n";
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          if (pt.flows(i, j) != 0.0) out << i + 1 << ',' << j + 1 << ',' << csv::exact(pt.flows(i, j)) << '\n';
        }
      }
    }
    {
      auto out = open(period_file("primary", t));
      out << "sector_id,K,L,Y_nominal\n";
      for (Eigen::Index j = 0; j < n; ++j) {
        out << j + 1 << ',' << csv::exact(pt.capital(j)) << ',' << csv::exact(pt.labor(j)) << ','
            << csv::exact(pt.output_nominal(j)) << '\n';
      }
    }
    {
      auto out = open(period_file("final", t));
      out << "commodity_id,H,G,E,price\n";
      for (Eigen::Index i = 0; i < n; ++i) {
        out << i + 1 << ',' << csv::exact(pt.household(i)) << ',' << csv::exact(pt.capital_formation(i)) << ','
            << csv::exact(pt.net_exports(i)) << ',' << csv::exact(pt.price(i)) << '\n';
      }
    }
  }
  auto out = open("factors.csv");
  out << "t,r,w\n";
  for (int t = 0; t < kPeriods; ++t) {
    out << t << ',' << csv::exact(tables[t].capital_price) << ',' << csv::exact(tables[t].wage) << '\n';
  }
}

CostShareTable compute_cost_shares(const LinkedIOTables& tables) {
  check_shapes(tables);
  const auto n = static_cast<Eigen::Index>(tables.n_sectors());
  CostShareTable shares;
  for (int t = 0; t < kPeriods; ++t) {
    const auto& pt = tables[t];
    auto& a = shares.a[static_cast<std::size_t>(t)];
    auto& a_K = shares.a_K[static_cast<std::size_t>(t)];
    auto& a_L = shares.a_L[static_cast<std::size_t>(t)];
    a.resize(n, n);
    a_K.resize(n);
    a_L.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double output = pt.output_nominal(j);
      if (!(output > 0.0)) {
        throw ValidationError(sector_label(j) + ": zero output (t=" + std::to_string(t) + ")");
      }
      for (Eigen::Index i = 0; i < n; ++i) a(i, j) = pt.price(i) * pt.flows(i, j) / output;
      a_K(j) = pt.capital_price * pt.capital(j) / output;
      a_L(j) = 1.0 - a_K(j) - a.col(j).sum();
      if (!(a_L(j) > 0.0)) {
        throw ValidationError(sector_label(j) + ": residual labor share is not positive (t=" +
                              std::to_string(t) + ")");
      }
    }
  }
  return shares;
}

LinkedIOTables normalize_prices(const LinkedIOTables& tables, int period) {
  check_shapes(tables);
  if (period < 0 || period >= kPeriods) throw ValidationError("normalization period must be 0 or 1");
  const auto& base = tables[period];
  const Eigen::VectorXd scale = base.price;
  const double r_scale = base.capital_price;
  const double w_scale = base.wage;

  LinkedIOTables out = tables;
  for (int t = 0; t < kPeriods; ++t) {
    auto& pt = out[t];
    pt.price = tables[t].price.cwiseQuotient(scale);
    pt.flows = scale.asDiagonal() * tables[t].flows;
    pt.household = tables[t].household.cwiseProduct(scale);
    pt.capital_formation = tables[t].capital_formation.cwiseProduct(scale);
    pt.net_exports = tables[t].net_exports.cwiseProduct(scale);
    pt.capital_price = tables[t].capital_price / r_scale;
    pt.capital = tables[t].capital * r_scale;
    pt.wage = tables[t].wage / w_scale;
    pt.labor = tables[t].labor * w_scale;
  }
  for (int t = 0; t < kPeriods; ++t) {
    if (t == period) {
      out[t].price.setOnes();
      out[t].capital_price = 1.0;
      out[t].wage = 1.0;
    }
  }
  return out;
}

}  // namespace ccge
