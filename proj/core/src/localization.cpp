#include "casc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

namespace casc {

namespace {

constexpr std::pair<EstimateFlag, const char*> kFlagNames[] = {
    {EstimateFlag::kOutOfSpan, "OUT_OF_SPAN"},
    {EstimateFlag::kDegenerateDt, "DEGENERATE_DT"},
    {EstimateFlag::kInsufficientSensors, "INSUFFICIENT_SENSORS"},
};

}  // namespace

std::string EstimateFlags::to_string() const {
  std::string out;
  for (const auto& [flag, name] : kFlagNames) {
    if (!has(flag)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

EstimateFlags EstimateFlags::parse(const std::string& text) {
  EstimateFlags flags;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, '|')) {
    if (token.empty()) continue;
    auto it = std::find_if(std::begin(kFlagNames), std::end(kFlagNames),
                           [&](const auto& entry) { return token == entry.second; });
    if (it == std::end(kFlagNames)) throw PreconditionError("unknown estimate flag " + token);
    flags.set(it->first);
  }
  return flags;
}

SensorTriple select_triple(std::span<const RetimedEvent> cluster, const CableGeometry& geom) {
  // First good detection per sensor.
  std::map<SensorId, double> times;
  for (const auto& e : cluster) {
    if (e.status != RetimeStatus::kOk) continue;
    if (!geom.index_of(e.sensor_id)) {
      throw PreconditionError("select_triple: sensor " + std::to_string(e.sensor_id) +
                              " not in geometry");
    }
    times.try_emplace(e.sensor_id, e.retimed_us);
  }
  if (times.size() < 3) {
    throw LocalizationError(EstimateFlag::kInsufficientSensors,
                            "cluster has " + std::to_string(times.size()) + " sensors, need 3");
  }

  std::vector<std::pair<double, SensorId>> order;
  for (const auto& [id, t] : times) order.emplace_back(t, id);
  std::sort(order.begin(), order.end());

  const SensorId first = order[0].second;
  const SensorId second = order[1].second;
  const auto i_first = static_cast<std::ptrdiff_t>(*geom.index_of(first));
  const auto i_second = static_cast<std::ptrdiff_t>(*geom.index_of(second));
  const std::ptrdiff_t dir = i_second > i_first ? 1 : -1;

  auto detected_at = [&](std::ptrdiff_t index) -> std::optional<SensorId> {
    if (index < 0 || index >= static_cast<std::ptrdiff_t>(geom.size())) return std::nullopt;
    const SensorId id = geom.sensor_ids[static_cast<std::size_t>(index)];
    if (!times.contains(id)) return std::nullopt;
    return id;
  };

  if (auto outer = detected_at(i_first - dir)) return {*outer, first, second};
  if (auto outer = detected_at(i_second + dir)) return {*outer, second, first};
  throw LocalizationError(EstimateFlag::kInsufficientSensors,
                          "no detecting neighbour outside the bracketing pair");
}

double estimate_speed(double t_s1_us, double t_s2_us, double spacing_12_m) {
  if (!(spacing_12_m > 0.0)) throw PreconditionError("estimate_speed: spacing must be positive");
  const double dt_us = t_s1_us - t_s2_us;
  if (!(dt_us > 0.0)) {
    throw LocalizationError(EstimateFlag::kDegenerateDt,
                            "estimate_speed: non-positive dt12 " + std::to_string(dt_us));
  }
  return spacing_12_m / (dt_us / kMicrosPerSecond);
}

double estimate_position(double t_s2_us, double t_s3_us, double spacing_23_m, double v_m_s) {
  if (!(v_m_s > 0.0)) throw PreconditionError("estimate_position: speed must be positive");
  if (!(spacing_23_m > 0.0)) {
    throw PreconditionError("estimate_position: spacing must be positive");
  }
  const double dt23_s = (t_s3_us - t_s2_us) / kMicrosPerSecond;
  return 0.5 * (spacing_23_m - v_m_s * dt23_s);
}

bool within_span(double offset_m, double spacing_m) {
  const double slack = 1e-9 * spacing_m;
  return offset_m >= -slack && offset_m <= spacing_m + slack;
}

RuptureEstimate localize(std::span<const RetimedEvent> cluster, const CableGeometry& geom) {
  RuptureEstimate estimate;
  try {
    const SensorTriple triple = select_triple(cluster, geom);
    estimate.triple = triple;
    auto time_of = [&](SensorId id) {
      return std::find_if(cluster.begin(), cluster.end(),
                          [&](const RetimedEvent& e) {
                            return e.sensor_id == id && e.status == RetimeStatus::kOk;
                          })
          ->retimed_us;
    };
    const double t1 = time_of(triple.s1);
    const double t2 = time_of(triple.s2);
    const double t3 = time_of(triple.s3);
    const double v = estimate_speed(t1, t2, geom.spacing(triple.s1, triple.s2));
    const double l23 = geom.spacing(triple.s2, triple.s3);
    const double offset = estimate_position(t2, t3, l23, v);
    const double p2 = geom.position_of(triple.s2);
    const double p3 = geom.position_of(triple.s3);
    estimate.v_est_m_s = v;
    estimate.x_est_m = p2 + (p3 > p2 ? offset : -offset);
    if (!within_span(offset, l23)) estimate.flags.set(EstimateFlag::kOutOfSpan);
  } catch (const LocalizationError& e) {
    estimate.flags.set(e.flag());
  }
  return estimate;
}

}  // namespace casc
