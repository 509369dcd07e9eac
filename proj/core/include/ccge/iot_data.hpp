#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ccge {

/// Number of observed periods in a linked table set (t = 0, 1).
inline constexpr int kPeriods = 2;

/// One period of a linked input-output table.
///
/// Quantities (flows, capital, labor, household, capital_formation,
/// net_exports) are real values; output_nominal is p_j * Y_j. Indices are
/// 0-based internally, 1-based in files.
struct PeriodTable {
  Eigen::MatrixXd flows;              ///< X(i, j): input i used by sector j
  Eigen::VectorXd output_nominal;     ///< p_j Y_j
  Eigen::VectorXd price;              ///< p_i
  Eigen::VectorXd capital;            ///< K_j (capital service)
  Eigen::VectorXd labor;              ///< L_j
  Eigen::VectorXd household;          ///< H_i
  Eigen::VectorXd capital_formation;  ///< G_i
  Eigen::VectorXd net_exports;        ///< E_i
  double capital_price = 1.0;         ///< r
  double wage = 1.0;                  ///< w

  Eigen::VectorXd real_output() const { return output_nominal.cwiseQuotient(price); }
};

/// Two-period linked input-output tables.
struct LinkedIOTables {
  std::array<PeriodTable, kPeriods> periods;

  std::size_t n_sectors() const { return static_cast<std::size_t>(periods[0].price.size()); }
  const PeriodTable& operator[](int t) const { return periods[static_cast<std::size_t>(t)]; }
  PeriodTable& operator[](int t) { return periods[static_cast<std::size_t>(t)]; }
};

/// Cost shares a(i, j), a_K(j), a_L(j) per period; a_L is the residual share.
struct CostShareTable {
  std::array<Eigen::MatrixXd, kPeriods> a;
  std::array<Eigen::VectorXd, kPeriods> a_K;
  std::array<Eigen::VectorXd, kPeriods> a_L;

  std::size_t n_sectors() const { return static_cast<std::size_t>(a_K[0].size()); }
};

struct ValidationOptions {
  double error_tolerance = 1e-8;    ///< relative balance residual that is a hard error
  double warning_tolerance = 1e-10; ///< relative balance residual that is reported
};

struct BalanceReport {
  double max_row_residual = 0.0;     ///< max relative cost-side residual over j, t
  double max_column_residual = 0.0;  ///< max relative demand-side residual over i, t
  double aggregate_residual = 0.0;   ///< |value added - final demand| / value added, max over t
  std::vector<std::string> warnings;
};

/// Checks every table invariant; throws ValidationError naming the sector on failure.
BalanceReport validate_tables(const LinkedIOTables& tables, const ValidationOptions& options = {});

struct LoadedTables {
  LinkedIOTables tables;
  BalanceReport balance;
};

/// Reads flows_t{0,1}.csv, primary_t{0,1}.csv, final_t{0,1}.csv and factors.csv from `dir`.
LoadedTables load_tables(const std::filesystem::path& dir, const ValidationOptions& options = {});

/// Writes the table set to `dir` in the same schema, with round-trip exact decimals.
void write_tables(const LinkedIOTables& tables, const std::filesystem::path& dir);

/// Names of the files making up a table set, relative to its directory.
std::vector<std::string> table_file_names();

CostShareTable compute_cost_shares(const LinkedIOTables& tables);

/// Rescales all prices so that period `period` prices equal one, keeping
/// nominal values unchanged (real quantities absorb the rescaling).
LinkedIOTables normalize_prices(const LinkedIOTables& tables, int period = 1);

}  // namespace ccge
