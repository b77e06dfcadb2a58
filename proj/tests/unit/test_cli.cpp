#include "kvsync/config.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef KVSYNC_CLI_PATH
#error "KVSYNC_CLI_PATH must point at the kvsync executable"
#endif

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kvsync_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult invoke(const std::string& args, const std::string& subdir = "out") {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + KVSYNC_CLI_PATH + "\" " + args + " --output-dir \"" +
                            (dir_ / subdir).string() + "\" > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ThresholdsOneDimensional) {
  const auto r = invoke("thresholds --gamma-noise 1 --radius 0.2 --dimension 1 --variant Unnormalised");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("Unnormalised,1,5\n"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "thresholds.csv"));
  const auto meta = nlohmann::json::parse(slurp(dir_ / "out" / "thresholds_metadata.json"));
  EXPECT_EQ(meta["suite_version"], "1.0.0");
  EXPECT_EQ(meta["params"]["kappa0"], 0.4);
}

TEST_F(CliTest, CriticalAtZeroField) {
  const auto r = invoke("critical --h 0 --tilt 0.5 --gamma-noise 1");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "critical.json"));
  EXPECT_NEAR(j["threshold"]["gamma_c"].get<double>(), 2.0, 1e-9);
}

TEST_F(CliTest, BranchMatchesPerturbationTheory) {
  const auto r = invoke("branch --tilt 0.5 --gamma-noise 1 --coupling 2 --h-max 0.2 --steps 20");
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "out" / "branch.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    double h, re, im, rp, ip;
    char c;
    std::istringstream ls(line);
    ls >> h >> c >> re >> c >> im >> c >> rp >> c >> ip;
    EXPECT_LT(std::abs(re - rp), 5e-4) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 21);
}

TEST_F(CliTest, CsvPayloadIsDeterministic) {
  ASSERT_EQ(invoke("sweep --tilt 0.5 --gammas 2.5,1.5 --hs 0.1,0 --threads 2", "a").status, 0);
  ASSERT_EQ(invoke("sweep --tilt 0.5 --gammas 1.5,2.5 --hs 0,0.1 --threads 1", "b").status, 0);
  const auto a = slurp(dir_ / "a" / "sweep.csv");
  EXPECT_EQ(a, slurp(dir_ / "b" / "sweep.csv"));
  EXPECT_EQ(a.substr(0, a.find('\n')), "gamma,h,F,re_lambda,im_lambda,gamma_c_pert");
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(dir_ / "p.cfg") << "tilt = 0.5\ncoupling = 2\nfield = 0.1\n";
  const auto r = invoke("kato --config \"" + (dir_ / "p.cfg").string() + "\" --h 0.2");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto meta = nlohmann::json::parse(slurp(dir_ / "out" / "kato_metadata.json"));
  EXPECT_EQ(meta["params"]["field"], 0.2);
  EXPECT_EQ(meta["params"]["tilt"], 0.5);
}

TEST_F(CliTest, EnvironmentDefaultOutputDirectory) {
  const auto target = dir_ / "env";
  const std::string cmd = "KVSYNC_OUTPUT_DIR=\"" + target.string() + "\" \"" + KVSYNC_CLI_PATH +
                          "\" thresholds > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(target / "thresholds.csv"));
}

TEST_F(CliTest, ErrorsAreOneLineJson) {
  auto r = invoke("bogus");
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "usage");

  std::ofstream(dir_ / "bad.cfg") << "tilt = 0.5\nwhat = 1\n";
  r = invoke("thresholds --config \"" + (dir_ / "bad.cfg").string() + "\"");
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "config");

  r = invoke("kato --tilt 0");
  EXPECT_EQ(r.status, 3);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"], "singular_parameters");
}

TEST_F(CliTest, ReproduceTable) {
  const auto r = invoke("reproduce table1 --strict");
  ASSERT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "table1"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "reproduce_table1_metadata.json"));
}
