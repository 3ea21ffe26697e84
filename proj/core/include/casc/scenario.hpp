#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "casc/clock.hpp"
#include "casc/transport.hpp"
#include "casc/wave.hpp"

namespace casc {

struct WaveParams {
  double wave_speed_m_s = kDefaultWaveSpeedMps;
  double threshold_g = kDefaultThresholdG;
  double window_us = kDefaultWindowUs;
  Ticks sampling_period_ticks = kDefaultSamplingPeriodTicks;
  AttenuationModel attenuation;
};

/// A detection not caused by any rupture (noise injection).
struct SpuriousEvent {
  SensorId sensor_id = 0;
  double time_ref_us = 0.0;
  double amplitude_g = 1.0;
};

/// Everything a simulated run depends on. The file form is JSON:
///
///   {
///     "geometry": {"sensor_positions_m": [...], "sensor_ids": [...]},
///     "clock":    {"drift_ppm": [...], "max_abs_drift_ppm": 1000},
///     "wave":     {"wave_speed_m_s", "threshold_g", "window_us",
///                  "sampling_period_ticks", "attenuation_per_m"},
///     "sync":     {"sync_period_T_us", "coincidence_window_us"},
///     "network":  {"rf_speed_m_s", "supervisor_position_m", "node_positions_m",
///                  "processing_latency_mean_us", "processing_latency_jitter_us",
///                  "drop_probability"},
///     "ruptures": [{"position_m", "time_ref_us", "peak_amplitude_g"}],
///     "spurious_events": [{"sensor_id", "time_ref_us", "amplitude_g"}],
///     "seed": 0,
///     "run_duration_us": ...
///   }
///
/// Only "geometry.sensor_positions_m" is required.
struct Scenario {
  CableGeometry geometry;
  /// Per sensor, in geometry order.
  std::vector<double> drift_ppm;
  double max_abs_drift_ppm = kDefaultMaxAbsDriftPpm;
  WaveParams wave;
  std::uint32_t sync_period_T_us = kDefaultSyncPeriodUs;
  double coincidence_window_us = kDefaultCoincidenceWindowUs;
  NetworkModel network;
  std::vector<RuptureEvent> ruptures;
  std::vector<SpuriousEvent> spurious_events;
  std::uint64_t seed = 0;
  double run_duration_us = 0.0;

  /// Four sensors at 0/10/20/30 m, drifts {+37, -12, +50, -50} ppm, one
  /// rupture at 14 m half way through the second period, no jitter.
  static Scenario canonical();

  /// Throws ScenarioError listing every violated invariant.
  void validate() const;

  /// Latest reference time at which any sensor can detect something.
  double latest_activity_us() const;
  /// Two whole periods past the latest activity, at least three periods.
  double default_run_duration_us() const;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses scenario JSON. `source` names the input in diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Loads just the geometry from either a scenario file or a bare
/// {"sensor_positions_m", "sensor_ids"} object.
CableGeometry load_geometry(const std::filesystem::path& path);

}  // namespace casc
