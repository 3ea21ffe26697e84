#include "casc/csv.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "support/gen.hpp"
#include "support/tempdir.hpp"

namespace casc {
namespace {

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

TEST(Csv, Headers) {
  EXPECT_EQ(std::string(kRetimedHeader),
            "period_index,sensor_id,raw_local_ticks,saved_counter_ticks,retimed_us,"
            "max_amplitude_g,status,cluster_id,source");
  const RunReport empty;
  EXPECT_EQ(detections_csv(empty), std::string(kDetectionsHeader) + "\n");
  EXPECT_EQ(retimed_csv(empty), std::string(kRetimedHeader) + "\n");
  EXPECT_EQ(estimates_csv(empty), std::string(kEstimatesHeader) + "\n");
  EXPECT_EQ(first_line(summary_csv(empty)), "metric,value");
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(14.0), "14");
  EXPECT_EQ(format_double(-0.1), "-0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "");
}

TEST(CsvProperty, FormatDoubleRoundTrips) {
  testing::Gen g(77);
  for (int i = 0; i < 5000; ++i) {
    const double x = g.uniform(-1e9, 1e9) * std::pow(10.0, g.integer(-12, 6));
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(Csv, ExportWritesFourFilesByteIdentically) {
  const RunReport report = run(Scenario::canonical());
  testing::TempDir a;
  testing::TempDir b;
  export_csv(report, a.path() / "out");
  export_csv(run(Scenario::canonical()), b.path() / "out");
  for (const char* name : {"detections.csv", "retimed.csv", "estimates.csv", "summary.csv"}) {
    const auto left = testing::read_file(a.path() / "out" / name);
    EXPECT_FALSE(left.empty()) << name;
    EXPECT_EQ(left, testing::read_file(b.path() / "out" / name)) << name;
  }
  const auto estimates = testing::read_file(a.path() / "out" / "estimates.csv");
  EXPECT_NE(estimates.find("\n1,0,4,0,1,2,"), std::string::npos) << estimates;
}

TEST(Csv, RetimedRoundTrip) {
  const RunReport report = run(Scenario::canonical());
  testing::TempDir dir;
  export_csv(report, dir.path());
  const auto events = read_retimed_csv(dir.path() / "retimed.csv");
  ASSERT_EQ(events.size(), report.retimed.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& want = report.retimed[i].event;
    EXPECT_EQ(events[i].period_index, want.period_index);
    EXPECT_EQ(events[i].sensor_id, want.sensor_id);
    EXPECT_EQ(events[i].raw_local_ticks, want.raw_local_ticks);
    EXPECT_EQ(events[i].saved_counter_ticks, want.saved_counter_ticks);
    EXPECT_EQ(events[i].retimed_us, want.retimed_us);
    EXPECT_EQ(events[i].max_amplitude_g, want.max_amplitude_g);
  }
}

TEST(Csv, ReadRejectsBadInput) {
  testing::TempDir dir;
  EXPECT_THROW(read_retimed_csv(dir.path() / "absent.csv"), std::runtime_error);
  EXPECT_THROW(read_retimed_csv(dir.write("empty.csv", "")), std::runtime_error);
  EXPECT_THROW(read_retimed_csv(dir.write("cols.csv", "period_index,sensor_id\n1,2\n")),
               std::runtime_error);
  const auto bad = dir.write("bad.csv", std::string(kRetimedHeader) + "\n1,0,abc,1000000,5,1,ok,,0\n");
  try {
    read_retimed_csv(bad);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:2"), std::string::npos) << e.what();
  }
}

TEST(Csv, ReadKeepsFaultedRows) {
  testing::TempDir dir;
  const auto path =
      dir.write("r.csv", std::string(kRetimedHeader) + "\n2,1,5,0,,1.5,zero_period_counter,,0\n");
  const auto events = read_retimed_csv(path);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_TRUE(std::isnan(events[0].retimed_us));
}

TEST(Csv, UnwritableDirectoryThrows) {
  testing::TempDir dir;
  const auto file = dir.write("plain", "x");
  EXPECT_THROW(export_csv(RunReport{}, file / "sub"), std::runtime_error);
}

}  // namespace
}  // namespace casc
