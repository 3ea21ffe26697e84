#include "casc/scenario.hpp"

#include <algorithm>

#include <gtest/gtest.h>

#include "support/tempdir.hpp"

namespace casc {
namespace {

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_scenario(text, "s.json");
  } catch (const ScenarioError& e) {
    return e.problems();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

constexpr const char* kMinimal = R"({
  "geometry": {"sensor_positions_m": [0, 10, 20, 30]},
  "ruptures": [{"position_m": 14, "time_ref_us": 1500000}]
})";

TEST(ParseScenario, MinimalFileTakesDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.geometry.sensor_ids, (std::vector<SensorId>{0, 1, 2, 3}));
  EXPECT_EQ(s.drift_ppm, (std::vector<double>(4, 0.0)));
  EXPECT_EQ(s.wave.wave_speed_m_s, 5000.0);
  EXPECT_EQ(s.wave.threshold_g, 0.8);
  EXPECT_EQ(s.wave.window_us, 3000.0);
  EXPECT_EQ(s.wave.sampling_period_ticks, 4u);
  EXPECT_EQ(s.sync_period_T_us, 1'000'000u);
  EXPECT_EQ(s.coincidence_window_us, 100'000.0);
  EXPECT_EQ(s.network.rf_speed_m_s, 180e6);
  EXPECT_EQ(s.network.supervisor_position_m, 0.0);
  EXPECT_EQ(s.network.node_positions_m.at(3), 30.0);
  EXPECT_EQ(s.network.processing_latency_mean_us, 20.0);
  EXPECT_EQ(s.network.processing_latency_jitter_us, 1.0);
  ASSERT_EQ(s.ruptures.size(), 1u);
  EXPECT_EQ(s.ruptures[0].peak_amplitude_g, 1.0);
  EXPECT_EQ(s.seed, 0u);
  EXPECT_EQ(s.run_duration_us, 3e6);
}

TEST(ParseScenario, EveryFieldRead) {
  const Scenario s = parse_scenario(R"({
    "geometry": {"sensor_positions_m": [5, 15, 25], "sensor_ids": [7, 8, 9]},
    "clock": {"drift_ppm": [1, -2, 3], "max_abs_drift_ppm": 100},
    "wave": {"wave_speed_m_s": 4000, "threshold_g": 0.5, "window_us": 2000,
             "sampling_period_ticks": 1, "attenuation_per_m": 0.01},
    "sync": {"sync_period_T_us": 500000, "coincidence_window_us": 50000},
    "network": {"rf_speed_m_s": 3e8, "supervisor_position_m": -10,
                "node_positions_m": [0, 1, 2], "processing_latency_mean_us": 5,
                "processing_latency_jitter_us": 2, "drop_probability": 0.1},
    "ruptures": [{"position_m": 6, "time_ref_us": 700000, "peak_amplitude_g": 3}],
    "spurious_events": [{"sensor_id": 8, "time_ref_us": 900000, "amplitude_g": 1.5}],
    "seed": 42,
    "run_duration_us": 5000000
  })");
  EXPECT_EQ(s.geometry.sensor_ids, (std::vector<SensorId>{7, 8, 9}));
  EXPECT_EQ(s.drift_ppm, (std::vector<double>{1, -2, 3}));
  EXPECT_EQ(s.max_abs_drift_ppm, 100.0);
  EXPECT_EQ(s.wave.attenuation.decay_per_m, 0.01);
  EXPECT_EQ(s.wave.sampling_period_ticks, 1u);
  EXPECT_EQ(s.sync_period_T_us, 500'000u);
  EXPECT_EQ(s.coincidence_window_us, 50'000.0);
  EXPECT_EQ(s.network.node_positions_m.at(9), 2.0);
  EXPECT_EQ(s.network.supervisor_position_m, -10.0);
  EXPECT_EQ(s.network.drop_probability, 0.1);
  EXPECT_EQ(s.network.seed, 42u);
  EXPECT_EQ(s.spurious_events.at(0).sensor_id, 8);
  EXPECT_EQ(s.ruptures.at(0).peak_amplitude_g, 3.0);
  EXPECT_EQ(s.run_duration_us, 5e6);
}

TEST(ParseScenario, RuptureOffTheCable) {
  const auto problems = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10, 20]},
    "ruptures": [{"position_m": -5, "time_ref_us": 0}]
  })");
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_TRUE(any_contains(problems, "ruptures[0].position_m")) << problems[0];
}

TEST(ParseScenario, UnknownFieldNamed) {
  const auto problems = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10, 20]},
    "colour": "red"
  })");
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_TRUE(any_contains(problems, "unknown field 'colour'"));
}

TEST(ParseScenario, NestedUnknownFieldNamedWithPath) {
  const auto problems = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10, 20]},
    "wave": {"speed": 5000}
  })");
  EXPECT_TRUE(any_contains(problems, "wave.speed: unknown field 'speed'"));
}

TEST(ParseScenario, ProblemsListedExhaustively) {
  const auto problems = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10]},
    "clock": {"drift_ppm": [1, 2, 3]},
    "wave": {"wave_speed_m_s": "fast"},
    "ruptures": [{"position_m": 50}]
  })");
  EXPECT_TRUE(any_contains(problems, "wave.wave_speed_m_s: expected a number"));
  EXPECT_TRUE(any_contains(problems, "ruptures[0].time_ref_us: required field missing"));
  EXPECT_GE(problems.size(), 2u);

  const auto semantic = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10]},
    "clock": {"drift_ppm": [1, 2000]},
    "ruptures": [{"position_m": 50, "time_ref_us": 0}]
  })");
  EXPECT_TRUE(any_contains(semantic, "at least 3 sensors"));
  EXPECT_TRUE(any_contains(semantic, "clock.drift_ppm[1]"));
  EXPECT_TRUE(any_contains(semantic, "ruptures[0].position_m"));
  EXPECT_EQ(semantic.size(), 3u);
}

TEST(ParseScenario, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_scenario("{\n  \"geometry\": [,\n}", "broken.json");
    FAIL();
  } catch (const ScenarioError& e) {
    ASSERT_FALSE(e.problems().empty());
    EXPECT_NE(e.problems()[0].find("broken.json:2:"), std::string::npos) << e.problems()[0];
  }
}

TEST(ParseScenario, MissingGeometry) {
  EXPECT_TRUE(any_contains(problems_of("{}"), "geometry: required field missing"));
  EXPECT_TRUE(any_contains(problems_of("[]"), "expected an object"));
}

TEST(ParseScenario, DurationMustCoverActivity) {
  const auto problems = problems_of(R"({
    "geometry": {"sensor_positions_m": [0, 10, 20]},
    "ruptures": [{"position_m": 5, "time_ref_us": 1500000}],
    "run_duration_us": 2000000
  })");
  EXPECT_TRUE(any_contains(problems, "run_duration_us"));
}

TEST(LoadScenario, FromFileAndMissingFile) {
  testing::TempDir dir;
  const auto path = dir.write("s.json", kMinimal);
  EXPECT_EQ(load_scenario(path).ruptures.size(), 1u);
  EXPECT_THROW(load_scenario(dir.path() / "absent.json"), ScenarioError);
}

TEST(LoadGeometry, ScenarioOrBareObject) {
  testing::TempDir dir;
  EXPECT_EQ(load_geometry(dir.write("s.json", kMinimal)).size(), 4u);
  const auto bare = load_geometry(
      dir.write("g.json", R"({"sensor_positions_m": [1, 2, 3], "sensor_ids": [4, 5, 6]})"));
  EXPECT_EQ(bare.sensor_ids, (std::vector<SensorId>{4, 5, 6}));
}

TEST(Canonical, IsValid) {
  const Scenario s = Scenario::canonical();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.drift_ppm, (std::vector<double>{37, -12, 50, -50}));
  EXPECT_EQ(s.network.processing_latency_jitter_us, 0.0);
  EXPECT_EQ(s.run_duration_us, 3e6);
  EXPECT_DOUBLE_EQ(s.latest_activity_us(), 1.5e6 + 16.0 / 5000.0 * 1e6);
}

TEST(Canonical, MatchesShippedFile) {
  const Scenario file = load_scenario(CASC_SOURCE_DIR "/scenarios/canonical.json");
  const Scenario code = Scenario::canonical();
  EXPECT_EQ(file.geometry, code.geometry);
  EXPECT_EQ(file.drift_ppm, code.drift_ppm);
  EXPECT_EQ(file.ruptures, code.ruptures);
  EXPECT_EQ(file.network.processing_latency_jitter_us, 0.0);
}

}  // namespace
}  // namespace casc
