#include "casc/wave.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "support/gen.hpp"

namespace casc {
namespace {

const CableGeometry kFour = CableGeometry::uniform(4);

TEST(Geometry, UniformLayout) {
  EXPECT_EQ(kFour.sensor_positions_m, (std::vector<double>{0, 10, 20, 30}));
  EXPECT_EQ(kFour.sensor_ids, (std::vector<SensorId>{0, 1, 2, 3}));
  EXPECT_EQ(kFour.spacing(3, 1), 20.0);
  EXPECT_EQ(kFour.position_of(2), 20.0);
  EXPECT_FALSE(kFour.index_of(9).has_value());
  EXPECT_THROW(kFour.position_of(9), PreconditionError);
}

TEST(Geometry, ValidateRejectsBadLayouts) {
  CableGeometry g = kFour;
  g.sensor_positions_m[2] = 10.0;
  EXPECT_THROW(g.validate(), PreconditionError);
  g = kFour;
  g.sensor_ids[3] = 0;
  EXPECT_THROW(g.validate(), PreconditionError);
  g = kFour;
  g.sensor_ids.pop_back();
  EXPECT_THROW(g.validate(), PreconditionError);
  EXPECT_THROW(CableGeometry{}.validate(), PreconditionError);
  EXPECT_NO_THROW(kFour.validate());
}

TEST(Arrival, AtOwnPositionIsRuptureTime) {
  EXPECT_EQ(arrival_time(kFour, {10.0, 777.0}, 1, 5000.0), 777.0);
}

TEST(Arrival, TenMetresAtFiveKilometresPerSecond) {
  EXPECT_DOUBLE_EQ(arrival_time(kFour, {0.0, 100.0}, 1, 5000.0), 2100.0);
}

TEST(Arrival, SevenAndAHalfMetres) {
  EXPECT_DOUBLE_EQ(arrival_time(kFour, {12.5, 0.0}, 2, 5000.0), 1500.0);
}

TEST(Arrival, RejectsNonPositiveSpeed) {
  EXPECT_THROW(arrival_time(kFour, {5.0, 0.0}, 0, 0.0), PreconditionError);
}

TEST(Detect, AboveThreshold) {
  auto r = detect(10.0, 1.0, 0.8);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->max_amplitude_g, 1.0);
  EXPECT_EQ(r->arrival_ref_us, 10.0);
  EXPECT_EQ(r->capture_window_us, 3000.0);
}

TEST(Detect, JustBelowThreshold) { EXPECT_FALSE(detect(0.0, 0.79, 0.8)); }

TEST(Detect, ExactlyAtThresholdIsInclusive) { EXPECT_TRUE(detect(0.0, 0.8, 0.8)); }

TEST(Quantize, CeilingToMultiple) {
  EXPECT_EQ(quantize_to_sampling(1999.0, 4), 2000u);
  EXPECT_EQ(quantize_to_sampling(2000.0, 4), 2000u);
  EXPECT_EQ(quantize_to_sampling(1.0, 4), 4u);
  EXPECT_EQ(quantize_to_sampling(0.0, 4), 0u);
  EXPECT_EQ(quantize_to_sampling(2000.0000000001, 4), 2000u);
  EXPECT_EQ(quantize_to_sampling(2000.5, 4), 2004u);
  EXPECT_EQ(quantize_to_sampling(17.2, 1), 18u);
  EXPECT_THROW(quantize_to_sampling(5.0, 0), PreconditionError);
}

TEST(SimulateRupture, CanonicalArrivals) {
  const auto records = simulate_rupture(kFour, {14.0, 0.0}, 5000.0);
  ASSERT_EQ(records.size(), 4u);
  const double expected[] = {2800.0, 800.0, 1200.0, 3200.0};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(records[i].sensor_id, i);
    // d / v in microseconds, computed independently.
    EXPECT_NEAR(records[i].arrival_ref_us, expected[i], 1e-9);
    EXPECT_FALSE(records[i].local_timestamp_ticks.has_value());
  }
}

TEST(SimulateRupture, AtSensorHasZeroOffset) {
  const auto records = simulate_rupture(kFour, {20.0, 42.0}, 5000.0);
  EXPECT_EQ(records[2].arrival_ref_us, 42.0);
}

TEST(SimulateRupture, BelowThresholdEverywhere) {
  EXPECT_TRUE(simulate_rupture(kFour, {14.0, 0.0, 0.5}, 5000.0, 0.8).empty());
}

TEST(SimulateRupture, AttenuationDropsDistantSensors) {
  // 2 g decaying at 0.06 / m falls below 0.8 g beyond ln(2.5) / 0.06 = 15.3 m.
  const auto records = simulate_rupture(kFour, {14.0, 0.0, 2.0}, 5000.0, 0.8, {0.06});
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0].sensor_id, 0);
  EXPECT_NEAR(records[0].max_amplitude_g, 2.0 * std::exp(-0.06 * 14.0), 1e-12);
  EXPECT_EQ(records[2].sensor_id, 2);
}

TEST(SimulateRupture, OutsideExtentIsRejected) {
  EXPECT_THROW(simulate_rupture(kFour, {-5.0, 0.0}), PreconditionError);
  EXPECT_THROW(simulate_rupture(kFour, {30.5, 0.0}), PreconditionError);
}

// Holds for evenly spaced sensors. Uneven spacing can put a sensor outside
// the span nearer than the far end of the span.
TEST(WaveProperty, EarliestTwoBracketTheRupture) {
  testing::Gen g(201);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto n = g.integer<std::size_t>(3, 12);
    const CableGeometry geom = CableGeometry::uniform(n, g.uniform(1.0, 50.0), g.uniform(-50, 50));
    const auto span = g.integer<std::size_t>(0, n - 2);
    const double lo = geom.sensor_positions_m[span];
    const double hi = geom.sensor_positions_m[span + 1];
    const double x = lo + (hi - lo) * g.uniform(1e-6, 1.0 - 1e-6);
    auto records = simulate_rupture(geom, {x, 0.0}, g.uniform(1000.0, 8000.0));
    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
      return a.arrival_ref_us < b.arrival_ref_us;
    });
    const double p0 = geom.position_of(records[0].sensor_id);
    const double p1 = geom.position_of(records[1].sensor_id);
    ASSERT_LE(std::min(p0, p1), x) << "trial " << trial;
    ASSERT_GE(std::max(p0, p1), x) << "trial " << trial;
  }
}

TEST(WaveProperty, ArrivalsTranslateWithRuptureTime) {
  testing::Gen g(202);
  for (int trial = 0; trial < 2000; ++trial) {
    const CableGeometry geom = testing::random_geometry(g, 2, 10, 0.5, 40.0);
    const double x = g.uniform(geom.min_position(), geom.max_position());
    const double t0 = g.uniform(0.0, 1e6);
    const double shift = g.uniform(-1e5, 1e5);
    const double v = g.uniform(1000.0, 8000.0);
    const auto a = simulate_rupture(geom, {x, t0}, v);
    const auto b = simulate_rupture(geom, {x, t0 + shift}, v);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_NEAR(b[i].arrival_ref_us - a[i].arrival_ref_us, shift, 1e-6) << "trial " << trial;
    }
  }
}

TEST(WaveProperty, BracketingArrivalsSumToSpanTraversal) {
  testing::Gen g(203);
  for (int trial = 0; trial < 2000; ++trial) {
    const CableGeometry geom = testing::random_geometry(g, 2, 10, 0.5, 40.0);
    const auto i = g.integer<std::size_t>(0, geom.size() - 2);
    const double lo = geom.sensor_positions_m[i];
    const double hi = geom.sensor_positions_m[i + 1];
    const double x = g.uniform(lo, hi);
    const double t0 = g.uniform(0.0, 1e6);
    const double v = g.uniform(1000.0, 8000.0);
    const double sum = arrival_time(geom, {x, t0}, geom.sensor_ids[i], v) +
                       arrival_time(geom, {x, t0}, geom.sensor_ids[i + 1], v) - 2.0 * t0;
    ASSERT_NEAR(sum, (hi - lo) / v * 1e6, 1e-6) << "trial " << trial;
  }
}

}  // namespace
}  // namespace casc
