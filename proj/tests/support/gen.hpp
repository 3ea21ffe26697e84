#pragma once

// Seeded generators for property tests. Every property loop logs its seed
// and case index so a failure can be replayed.

#include <cstdint>
#include <random>
#include <vector>

#include "casc/wave.hpp"
#include "casc/wire.hpp"

namespace casc::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  template <typename I>
  I integer(I lo, I hi) {
    return static_cast<I>(std::uniform_int_distribution<std::uint64_t>(
        static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi))(rng_));
  }

  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

inline SyncFrame random_frame(Gen& g) {
  return {static_cast<PeriodIndex>(g.bits()), static_cast<std::uint32_t>(g.bits())};
}

/// Arbitrary field values, including the extremes of every width.
inline SensorReport random_report(Gen& g, std::size_t max_events = kMaxReportEvents) {
  auto pick64 = [&] {
    switch (g.integer<int>(0, 3)) {
      case 0: return std::uint64_t{0};
      case 1: return UINT64_MAX;
      default: return g.bits();
    }
  };
  SensorReport r;
  r.sensor_id = static_cast<SensorId>(pick64());
  r.period_index = static_cast<PeriodIndex>(pick64());
  r.saved_counter_T_i = pick64();
  // Mostly small reports, occasionally the full cap.
  const std::size_t n = g.coin(0.02) ? max_events : g.integer<std::size_t>(0, std::min<std::size_t>(max_events, 40));
  for (std::size_t i = 0; i < n; ++i) {
    r.events.push_back({pick64(), static_cast<std::uint32_t>(pick64())});
  }
  return r;
}

/// Strictly increasing positions with gaps in [min_gap, max_gap].
inline CableGeometry random_geometry(Gen& g, std::size_t min_n, std::size_t max_n,
                                     double min_gap, double max_gap) {
  CableGeometry geom;
  const std::size_t n = g.integer<std::size_t>(min_n, max_n);
  double x = g.uniform(-100.0, 100.0);
  for (std::size_t i = 0; i < n; ++i) {
    geom.sensor_positions_m.push_back(x);
    geom.sensor_ids.push_back(static_cast<SensorId>(i));
    x += g.uniform(min_gap, max_gap);
  }
  return geom;
}

}  // namespace casc::testing
