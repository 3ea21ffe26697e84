#include "cli.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "casc/csv.hpp"
#include "support/tempdir.hpp"

namespace casc {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kCanonical = CASC_SOURCE_DIR "/scenarios/canonical.json";

TEST(Cli, SimulateWritesTables) {
  testing::TempDir dir;
  const auto r = cli({"simulate", kCanonical, "--out", dir.path().string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("detections = 4"), std::string::npos) << r.out;
  for (const char* name : {"detections.csv", "retimed.csv", "estimates.csv", "summary.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / name)) << name;
  }
}

TEST(Cli, LocalizeReproducesSimulatedEstimate) {
  testing::TempDir dir;
  ASSERT_EQ(cli({"simulate", kCanonical, "--out", dir.path().string()}).code, kExitOk);
  const auto r =
      cli({"localize", (dir.path() / "retimed.csv").string(), "--geometry", kCanonical});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto estimates = testing::read_file(dir.path() / "estimates.csv");
  // period 1, cluster 0, four events, triple 0/1/2, then the same x and v.
  const std::string row = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(row.rfind("1,0,4,0,1,2,", 0), 0u) << r.out;
  const std::string xv = row.substr(12, row.find(',', row.find(',', 12) + 1) - 12);
  EXPECT_NE(estimates.find(xv), std::string::npos) << xv << "\n" << estimates;
}

TEST(Cli, MissingScenarioFails) {
  testing::TempDir dir;
  const auto r = cli({"simulate", (dir.path() / "nope.json").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("error: "), std::string::npos);
}

TEST(Cli, InvalidScenarioListsEveryProblem) {
  testing::TempDir dir;
  const auto path = dir.write("bad.json", R"({"geometry": {"sensor_positions_m": [0, 10]},
    "ruptures": [{"position_m": 50, "time_ref_us": 0}]})");
  const auto r = cli({"simulate", path.string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, kExitFailure);
  std::size_t lines = 0;
  for (char c : r.err) lines += c == '\n';
  EXPECT_EQ(lines, 2u) << r.err;
}

TEST(Cli, UsageErrors) {
  const auto bad_flag = cli({"simulate", kCanonical, "--out", "x", "--bogus"});
  EXPECT_EQ(bad_flag.code, kExitUsage);
  EXPECT_NE(bad_flag.err.find("simulate"), std::string::npos);
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"montecarlo", kCanonical, "--trials", "0"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, SyncDemoCancelsDrift) {
  const auto r = cli({"sync-demo", "--periods", "2", "--drift-ppm", "50", "-50"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0") << line;
  }
  EXPECT_EQ(rows, 4);
}

TEST(Cli, MonteCarloSummary) {
  const auto r = cli({"montecarlo", kCanonical, "--trials", "20", "--seed", "5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("trials = 20\n"), std::string::npos);
  EXPECT_NE(r.out.find("failures = 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("p99_error_m = "), std::string::npos);
}

}  // namespace
}  // namespace casc
