#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "ccge/errors.hpp"
#include "ccge/iot_data.hpp"
#include "ccge/synthetic.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace ccge;
using ccge::testing::fixture_dir;
using ccge::testing::scratch_dir;

namespace {

LinkedIOTables labor_only_economy() {
  LinkedIOTables tables;
  for (int t = 0; t < kPeriods; ++t) {
    auto& pt = tables[t];
    const double scale = t == 0 ? 1.0 : 1.2;
    pt.flows = Eigen::MatrixXd::Zero(1, 1);
    pt.price = Eigen::VectorXd::Ones(1);
    pt.capital = Eigen::VectorXd::Zero(1);
    pt.labor = Eigen::VectorXd::Constant(1, 10.0 * scale);
    pt.output_nominal = Eigen::VectorXd::Constant(1, 10.0 * scale);
    pt.household = Eigen::VectorXd::Constant(1, 10.0 * scale);
    pt.capital_formation = Eigen::VectorXd::Zero(1);
    pt.net_exports = Eigen::VectorXd::Zero(1);
  }
  return tables;
}

void replace_line(const fs::path& path, const std::string& from, const std::string& to) {
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto pos = text.find(from);
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, from.size(), to);
  std::ofstream(path) << text;
}

fs::path copy_fixture(const std::string& name) {
  const auto dir = scratch_dir(name);
  fs::copy(fixture_dir("three_sector"), dir, fs::copy_options::overwrite_existing | fs::copy_options::recursive);
  return dir;
}

}  // namespace

TEST(LoadTables, ThreeSectorFixture) {
  const auto loaded = load_tables(fixture_dir("three_sector"));
  EXPECT_EQ(loaded.tables.n_sectors(), 3u);
  EXPECT_DOUBLE_EQ(loaded.tables[0].flows(0, 1), 10.0);
  EXPECT_DOUBLE_EQ(loaded.tables[1].labor(2), 11.0);
  EXPECT_LT(loaded.balance.max_row_residual, 1e-12);
}

TEST(LoadTables, SparsityMismatchIsRejected) {
  const auto dir = copy_fixture("sparsity");
  replace_line(dir / "flows_t0.csv", "1,2,10\n", "");
  // Keep the balances intact so only the support differs between periods.
  replace_line(dir / "primary_t0.csv", "2,5,15,30", "2,5,25,30");
  replace_line(dir / "final_t0.csv", "1,10,3,2,1", "1,20,3,2,1");
  try {
    load_tables(dir);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("sparsity"), std::string::npos) << e.what();
  }
}

TEST(LoadTables, MissingFileNamesThePath) {
  const auto dir = copy_fixture("missing");
  fs::remove(dir / "final_t1.csv");
  try {
    load_tables(dir);
    FAIL() << "expected an io error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("final_t1.csv"), std::string::npos);
  }
}

TEST(LoadTables, UnbalancedRowIsRejected) {
  const auto dir = copy_fixture("unbalanced");
  replace_line(dir / "primary_t1.csv", "3,5.5,11,33", "3,5.5,12,33");
  EXPECT_THROW(load_tables(dir), ValidationError);
}

TEST(LoadTables, LooseToleranceTurnsErrorIntoWarning) {
  const auto dir = copy_fixture("loose");
  replace_line(dir / "primary_t1.csv", "3,5.5,11,33", "3,5.5,11.000001,33");
  EXPECT_THROW(load_tables(dir), ValidationError);
  const auto loaded = load_tables(dir, {1e-6, 1e-10});
  EXPECT_FALSE(loaded.balance.warnings.empty());
}

TEST(LoadTables, WriteThenReloadIsBitIdentical) {
  const auto economy = generate_synthetic_economy(10, 3);
  const auto dir = scratch_dir("roundtrip");
  write_tables(economy.tables, dir);
  const auto reloaded = load_tables(dir).tables;
  for (int t = 0; t < kPeriods; ++t) {
    const auto& a = economy.tables[t];
    const auto& b = reloaded[t];
    EXPECT_EQ(a.flows, b.flows);
    EXPECT_EQ(a.price, b.price);
    EXPECT_EQ(a.capital, b.capital);
    EXPECT_EQ(a.labor, b.labor);
    EXPECT_EQ(a.output_nominal, b.output_nominal);
    EXPECT_EQ(a.household, b.household);
    EXPECT_EQ(a.capital_formation, b.capital_formation);
    EXPECT_EQ(a.net_exports, b.net_exports);
    EXPECT_EQ(a.capital_price, b.capital_price);
    EXPECT_EQ(a.wage, b.wage);
  }
}

TEST(CostShares, LaborOnlySector) {
  const auto shares = compute_cost_shares(labor_only_economy());
  for (int t = 0; t < kPeriods; ++t) {
    EXPECT_DOUBLE_EQ(shares.a_L[static_cast<std::size_t>(t)](0), 1.0);
    EXPECT_DOUBLE_EQ(shares.a_K[static_cast<std::size_t>(t)](0), 0.0);
    EXPECT_DOUBLE_EQ(shares.a[static_cast<std::size_t>(t)](0, 0), 0.0);
  }
}

TEST(CostShares, SumToOne) {
  const auto economy = generate_synthetic_economy(12, 5);
  const auto shares = compute_cost_shares(economy.tables);
  for (std::size_t t = 0; t < kPeriods; ++t) {
    const Eigen::VectorXd total = shares.a[t].colwise().sum().transpose() + shares.a_K[t] + shares.a_L[t];
    EXPECT_LT((total.array() - 1.0).abs().maxCoeff(), 1e-15);
  }
}

TEST(CostShares, MatchGeneratorShares) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto economy = generate_synthetic_economy(8, seed);
    const auto shares = compute_cost_shares(economy.tables);
    for (std::size_t t = 0; t < kPeriods; ++t) {
      EXPECT_LT((shares.a[t] - economy.states[t].A).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((shares.a_K[t] - economy.states[t].a_K).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((shares.a_L[t] - economy.states[t].a_L).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(NormalizePrices, KeepsNominalValues) {
  auto economy = generate_synthetic_economy(6, 2, [] {
    GeneratorConfig c;
    c.normalized = false;
    return c;
  }());
  const auto normalized = normalize_prices(economy.tables, 1);
  EXPECT_LT((normalized[1].price.array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_DOUBLE_EQ(normalized[1].wage, 1.0);
  for (int t = 0; t < kPeriods; ++t) {
    const auto& a = economy.tables[t];
    const auto& b = normalized[t];
    EXPECT_LT(((a.price.cwiseProduct(a.household) - b.price.cwiseProduct(b.household)).array().abs()).maxCoeff(),
              1e-12);
    EXPECT_LT((a.output_nominal - b.output_nominal).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.wage * a.labor.sum(), b.wage * b.labor.sum(), 1e-10);
  }
  const auto sa = compute_cost_shares(economy.tables);
  const auto sb = compute_cost_shares(normalized);
  for (std::size_t t = 0; t < kPeriods; ++t) EXPECT_LT((sa.a[t] - sb.a[t]).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NO_THROW(validate_tables(normalized));
}

TEST(Synthetic, SingleSectorHasNoIntermediateShareWithoutSelfUse) {
  GeneratorConfig config;
  config.self_use = 0.0;
  const auto economy = generate_synthetic_economy(1, 4, config);
  const auto shares = compute_cost_shares(economy.tables);
  for (std::size_t t = 0; t < kPeriods; ++t) EXPECT_NEAR(shares.a_K[t](0) + shares.a_L[t](0), 1.0, 1e-15);
}

TEST(Synthetic, BalancesHold) {
  const auto economy = generate_synthetic_economy(10, 11);
  const auto report = validate_tables(economy.tables, {1e-10, 1e-10});
  EXPECT_LT(report.max_row_residual, 1e-10);
  EXPECT_LT(report.max_column_residual, 1e-10);
  EXPECT_LT(report.aggregate_residual, 1e-10);
}

TEST(Synthetic, SameSeedSameTables) {
  const auto a = generate_synthetic_economy(10, 17);
  const auto b = generate_synthetic_economy(10, 17);
  for (int t = 0; t < kPeriods; ++t) {
    EXPECT_EQ(a.tables[t].flows, b.tables[t].flows);
    EXPECT_EQ(a.tables[t].output_nominal, b.tables[t].output_nominal);
    EXPECT_EQ(a.tables[t].household, b.tables[t].household);
  }
  const auto c = generate_synthetic_economy(10, 18);
  EXPECT_NE(a.tables[0].output_nominal, c.tables[0].output_nominal);
}
