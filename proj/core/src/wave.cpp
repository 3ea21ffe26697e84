#include "casc/wave.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace casc {

CableGeometry CableGeometry::uniform(std::size_t count, double spacing_m, double origin_m) {
  CableGeometry geom;
  for (std::size_t i = 0; i < count; ++i) {
    geom.sensor_positions_m.push_back(origin_m + spacing_m * static_cast<double>(i));
    geom.sensor_ids.push_back(static_cast<SensorId>(i));
  }
  return geom;
}

void CableGeometry::validate() const {
  if (sensor_positions_m.size() != sensor_ids.size()) {
    throw PreconditionError("geometry: " + std::to_string(sensor_positions_m.size()) +
                            " positions but " + std::to_string(sensor_ids.size()) + " ids");
  }
  if (sensor_ids.empty()) throw PreconditionError("geometry: no sensors");
  for (std::size_t i = 0; i < sensor_positions_m.size(); ++i) {
    if (!std::isfinite(sensor_positions_m[i])) {
      throw PreconditionError("geometry: non-finite position at index " + std::to_string(i));
    }
    if (i > 0 && !(sensor_positions_m[i] > sensor_positions_m[i - 1])) {
      throw PreconditionError("geometry: positions not strictly increasing at index " +
                              std::to_string(i));
    }
  }
  std::set<SensorId> seen(sensor_ids.begin(), sensor_ids.end());
  if (seen.size() != sensor_ids.size()) throw PreconditionError("geometry: duplicate sensor id");
}

std::optional<std::size_t> CableGeometry::index_of(SensorId id) const {
  auto it = std::find(sensor_ids.begin(), sensor_ids.end(), id);
  if (it == sensor_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - sensor_ids.begin());
}

double CableGeometry::position_of(SensorId id) const {
  auto idx = index_of(id);
  if (!idx) throw PreconditionError("unknown sensor id " + std::to_string(id));
  return sensor_positions_m[*idx];
}

double CableGeometry::spacing(SensorId a, SensorId b) const {
  return std::abs(position_of(b) - position_of(a));
}

double AttenuationModel::amplitude_at(double peak_g, double distance_m) const {
  if (decay_per_m == 0.0) return peak_g;
  return peak_g * std::exp(-decay_per_m * distance_m);
}

double arrival_time(const CableGeometry& geom, const RuptureEvent& rupture,
                    SensorId sensor_id, double wave_speed_m_s) {
  if (!(wave_speed_m_s > 0.0)) {
    throw PreconditionError("arrival_time: wave speed must be positive");
  }
  const double distance = std::abs(geom.position_of(sensor_id) - rupture.position_m);
  return rupture.time_ref_us + distance / wave_speed_m_s * kMicrosPerSecond;
}

std::optional<DetectionRecord> detect(double arrival_ref_us, double amplitude_at_sensor_g,
                                      double threshold_g, double window_us) {
  if (!(threshold_g > 0.0)) throw PreconditionError("detect: threshold must be positive");
  if (!(window_us > 0.0)) throw PreconditionError("detect: window must be positive");
  if (amplitude_at_sensor_g < threshold_g) return std::nullopt;
  DetectionRecord record;
  record.arrival_ref_us = arrival_ref_us;
  record.max_amplitude_g = amplitude_at_sensor_g;
  record.capture_window_us = window_us;
  return record;
}

Ticks quantize_to_sampling(double arrival_local_ticks, Ticks sampling_period_ticks) {
  if (sampling_period_ticks == 0) {
    throw PreconditionError("quantize_to_sampling: sampling period must be positive");
  }
  if (arrival_local_ticks <= 0.0) return 0;
  // Snap float noise onto the integer grid before taking the ceiling.
  double ticks = arrival_local_ticks;
  const double nearest = std::round(ticks);
  if (std::abs(ticks - nearest) < 1e-6) ticks = nearest;
  const auto period = static_cast<double>(sampling_period_ticks);
  return static_cast<Ticks>(std::ceil(ticks / period)) * sampling_period_ticks;
}

std::vector<DetectionRecord> simulate_rupture(const CableGeometry& geom,
                                              const RuptureEvent& rupture,
                                              double wave_speed_m_s, double threshold_g,
                                              const AttenuationModel& attenuation,
                                              double window_us) {
  geom.validate();
  if (rupture.position_m < geom.min_position() || rupture.position_m > geom.max_position()) {
    throw PreconditionError("simulate_rupture: rupture at " +
                            std::to_string(rupture.position_m) + " m outside cable extent");
  }
  std::vector<DetectionRecord> records;
  for (std::size_t i = 0; i < geom.size(); ++i) {
    const SensorId id = geom.sensor_ids[i];
    const double distance = std::abs(geom.sensor_positions_m[i] - rupture.position_m);
    const double amplitude = attenuation.amplitude_at(rupture.peak_amplitude_g, distance);
    auto record = detect(arrival_time(geom, rupture, id, wave_speed_m_s), amplitude,
                         threshold_g, window_us);
    if (record) {
      record->sensor_id = id;
      records.push_back(*record);
    }
  }
  return records;
}

}  // namespace casc
