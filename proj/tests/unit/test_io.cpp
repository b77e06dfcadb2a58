#include "kvsync/io.hpp"

#include <gtest/gtest.h>

using namespace kvsync;

TEST(CsvTable, FormatsCells) {
  CsvTable t("demo", {"a", "b", "c"});
  t.add_row({0.1, 3LL, std::string("x")});
  EXPECT_EQ(t.str(), "a,b,c\n0.10000000000000001,3,x\n");
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(CsvTable, BranchTableIsDeterministic) {
  ModelParams p;
  p.tilt = 0.5;
  p.coupling = 2.0;
  const auto grid = continuation_grid(0.1);
  const auto a = branch_table(eigen_branch(p, grid), lambda2(p), "branch").str();
  const auto b = branch_table(eigen_branch(p, grid), lambda2(p), "branch").str();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "h,re_lambda,im_lambda,re_lambda_pert,im_lambda_pert");
}

TEST(CsvTable, DensityTableShape) {
  const auto t = density_table(AngularDensity::uniform(4), "rho", 16);
  EXPECT_EQ(t.rows.size(), 16u);
  EXPECT_EQ(t.header.size(), 2u);
}

TEST(Json, MetadataCarriesVersionsAndParams) {
  ModelParams p;
  p.tilt = 0.25;
  const auto j = run_metadata("kato", p, Json{{"extra", 1}});
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["suite_version"], kSuiteVersion);
  EXPECT_EQ(j["params"]["tilt"], 0.25);
  EXPECT_EQ(j["params"]["variant"], "FullyNormalised");
  EXPECT_EQ(j["extra"], 1);
}
