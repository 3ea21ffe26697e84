#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "casc/clock.hpp"
#include "casc/units.hpp"

namespace casc {

/// Sensor positions along the cable axis, in meters, strictly increasing.
struct CableGeometry {
  std::vector<double> sensor_positions_m;
  std::vector<SensorId> sensor_ids;

  /// Evenly spaced sensors with ids 0..count-1.
  static CableGeometry uniform(std::size_t count, double spacing_m = kDefaultSensorSpacingM,
                               double origin_m = 0.0);

  /// Throws PreconditionError on size mismatch, duplicate ids, or
  /// non-increasing positions.
  void validate() const;

  std::size_t size() const { return sensor_ids.size(); }
  std::optional<std::size_t> index_of(SensorId id) const;
  /// Throws PreconditionError for unknown ids.
  double position_of(SensorId id) const;
  double spacing(SensorId a, SensorId b) const;
  double min_position() const { return sensor_positions_m.front(); }
  double max_position() const { return sensor_positions_m.back(); }

  friend bool operator==(const CableGeometry&, const CableGeometry&) = default;
};

struct RuptureEvent {
  double position_m = 0.0;
  double time_ref_us = 0.0;
  double peak_amplitude_g = 1.0;

  friend bool operator==(const RuptureEvent&, const RuptureEvent&) = default;
};

/// Exponential amplitude decay with distance. Zero means no attenuation.
struct AttenuationModel {
  double decay_per_m = 0.0;

  double amplitude_at(double peak_g, double distance_m) const;

  friend bool operator==(const AttenuationModel&, const AttenuationModel&) = default;
};

struct DetectionRecord {
  SensorId sensor_id = 0;
  double arrival_ref_us = 0.0;
  /// Filled in by the sensor once its local clock samples the front.
  std::optional<Ticks> local_timestamp_ticks;
  double max_amplitude_g = 0.0;
  double capture_window_us = kDefaultWindowUs;

  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

/// Reference time at which the wave front from `rupture` reaches the sensor.
/// The wave travels both ways from the break at `wave_speed_m_s`.
double arrival_time(const CableGeometry& geom, const RuptureEvent& rupture,
                    SensorId sensor_id, double wave_speed_m_s);

/// Threshold check at one sensor (inclusive). With the flat-amplitude model
/// the maximum over the capture window equals the arriving amplitude.
std::optional<DetectionRecord> detect(double arrival_ref_us, double amplitude_at_sensor_g,
                                      double threshold_g = kDefaultThresholdG,
                                      double window_us = kDefaultWindowUs);

/// First multiple of `sampling_period_ticks` at or after the counter value.
Ticks quantize_to_sampling(double arrival_local_ticks,
                           Ticks sampling_period_ticks = kDefaultSamplingPeriodTicks);

/// One record per sensor whose received amplitude clears the threshold,
/// in geometry order. Local timestamps are left empty.
std::vector<DetectionRecord> simulate_rupture(const CableGeometry& geom,
                                              const RuptureEvent& rupture,
                                              double wave_speed_m_s = kDefaultWaveSpeedMps,
                                              double threshold_g = kDefaultThresholdG,
                                              const AttenuationModel& attenuation = {},
                                              double window_us = kDefaultWindowUs);

}  // namespace casc
