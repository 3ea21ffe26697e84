#include "casc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scenario_json.hpp"

namespace casc {

namespace detail {

json parse_json_or_throw(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioError({source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + e.what()});
  }
}

Scenario scenario_from_json(const json& node, const std::string& path,
                            std::vector<std::string>& problems) {
  Scenario s;
  ObjectReader root(node, path, problems);
  if (!root.valid()) return s;

  if (const json* g = root.child("geometry")) {
    ObjectReader geom(*g, root.field("geometry"), problems);
    geom.number_array("sensor_positions_m", s.geometry.sensor_positions_m, true);
    std::vector<std::uint64_t> ids;
    if (geom.unsigned_array("sensor_ids", ids, UINT16_MAX)) {
      s.geometry.sensor_ids.assign(ids.begin(), ids.end());
    } else if (!geom.has("sensor_ids")) {
      for (std::size_t i = 0; i < s.geometry.sensor_positions_m.size(); ++i) {
        s.geometry.sensor_ids.push_back(static_cast<SensorId>(i));
      }
    }
    geom.reject_unknown();
  } else {
    root.problem(root.field("geometry"), "required field missing");
  }
  const std::size_t n = s.geometry.sensor_positions_m.size();

  s.drift_ppm.assign(n, 0.0);
  if (const json* c = root.child("clock")) {
    ObjectReader clock(*c, root.field("clock"), problems);
    clock.number_array("drift_ppm", s.drift_ppm);
    clock.number("max_abs_drift_ppm", s.max_abs_drift_ppm);
    clock.reject_unknown();
  }

  if (const json* w = root.child("wave")) {
    ObjectReader wave(*w, root.field("wave"), problems);
    wave.number("wave_speed_m_s", s.wave.wave_speed_m_s);
    wave.number("threshold_g", s.wave.threshold_g);
    wave.number("window_us", s.wave.window_us);
    std::uint64_t sampling = s.wave.sampling_period_ticks;
    if (wave.unsigned_int("sampling_period_ticks", sampling, 1'000'000)) {
      s.wave.sampling_period_ticks = sampling;
    }
    wave.number("attenuation_per_m", s.wave.attenuation.decay_per_m);
    wave.reject_unknown();
  }

  if (const json* y = root.child("sync")) {
    ObjectReader sync(*y, root.field("sync"), problems);
    std::uint64_t period = s.sync_period_T_us;
    if (sync.unsigned_int("sync_period_T_us", period, UINT32_MAX)) {
      s.sync_period_T_us = static_cast<std::uint32_t>(period);
    }
    sync.number("coincidence_window_us", s.coincidence_window_us);
    sync.reject_unknown();
  }

  s.network = NetworkModel::from_geometry(s.geometry.sensor_positions_m.size() ==
                                                  s.geometry.sensor_ids.size()
                                              ? s.geometry
                                              : CableGeometry{});
  if (const json* nw = root.child("network")) {
    ObjectReader net(*nw, root.field("network"), problems);
    net.number("rf_speed_m_s", s.network.rf_speed_m_s);
    net.number("supervisor_position_m", s.network.supervisor_position_m);
    std::vector<double> radio;
    if (net.number_array("node_positions_m", radio)) {
      if (radio.size() != s.geometry.sensor_ids.size()) {
        net.problem(net.field("node_positions_m"),
                    "expected " + std::to_string(s.geometry.sensor_ids.size()) + " positions");
      } else {
        s.network.node_positions_m.clear();
        for (std::size_t i = 0; i < radio.size(); ++i) {
          s.network.node_positions_m[s.geometry.sensor_ids[i]] = radio[i];
        }
      }
    }
    net.number("processing_latency_mean_us", s.network.processing_latency_mean_us);
    net.number("processing_latency_jitter_us", s.network.processing_latency_jitter_us);
    net.number("drop_probability", s.network.drop_probability);
    net.reject_unknown();
  }

  if (const json* r = root.child("ruptures")) {
    if (!r->is_array()) {
      root.problem(root.field("ruptures"), "expected an array");
    } else {
      for (std::size_t i = 0; i < r->size(); ++i) {
        ObjectReader item((*r)[i], root.field("ruptures") + "[" + std::to_string(i) + "]",
                          problems);
        if (!item.valid()) continue;
        RuptureEvent rupture;
        item.number("position_m", rupture.position_m, true);
        item.number("time_ref_us", rupture.time_ref_us, true);
        item.number("peak_amplitude_g", rupture.peak_amplitude_g);
        item.reject_unknown();
        s.ruptures.push_back(rupture);
      }
    }
  }

  if (const json* sp = root.child("spurious_events")) {
    if (!sp->is_array()) {
      root.problem(root.field("spurious_events"), "expected an array");
    } else {
      for (std::size_t i = 0; i < sp->size(); ++i) {
        ObjectReader item((*sp)[i],
                          root.field("spurious_events") + "[" + std::to_string(i) + "]",
                          problems);
        if (!item.valid()) continue;
        SpuriousEvent event;
        std::uint64_t id = 0;
        if (item.unsigned_int("sensor_id", id, UINT16_MAX, true)) {
          event.sensor_id = static_cast<SensorId>(id);
        }
        item.number("time_ref_us", event.time_ref_us, true);
        item.number("amplitude_g", event.amplitude_g);
        item.reject_unknown();
        s.spurious_events.push_back(event);
      }
    }
  }

  root.unsigned_int("seed", s.seed, UINT64_MAX);
  s.network.seed = s.seed;
  if (!root.number("run_duration_us", s.run_duration_us)) {
    s.run_duration_us = s.default_run_duration_us();
  }
  root.reject_unknown();
  return s;
}

}  // namespace detail

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string what = "invalid scenario";
        for (const auto& p : problems) what += "\n  " + p;
        return what;
      }()),
      problems_(std::move(problems)) {}

Scenario Scenario::canonical() {
  Scenario s;
  s.geometry = CableGeometry::uniform(4);
  s.drift_ppm = {37.0, -12.0, 50.0, -50.0};
  s.network = NetworkModel::from_geometry(s.geometry);
  s.network.processing_latency_jitter_us = 0.0;
  s.ruptures = {RuptureEvent{14.0, 1'500'000.0, 2.0}};
  s.run_duration_us = s.default_run_duration_us();
  return s;
}

double Scenario::latest_activity_us() const {
  double latest = 0.0;
  if (!geometry.sensor_positions_m.empty() && wave.wave_speed_m_s > 0.0) {
    for (const auto& r : ruptures) {
      const double reach = std::max(std::abs(r.position_m - geometry.min_position()),
                                    std::abs(geometry.max_position() - r.position_m));
      latest = std::max(latest, r.time_ref_us + reach / wave.wave_speed_m_s * kMicrosPerSecond);
    }
  }
  for (const auto& e : spurious_events) latest = std::max(latest, e.time_ref_us);
  return latest;
}

double Scenario::default_run_duration_us() const {
  const double T = sync_period_T_us > 0 ? sync_period_T_us : kDefaultSyncPeriodUs;
  const double periods = std::max(3.0, std::floor(latest_activity_us() / T) + 2.0);
  return periods * T;
}

void Scenario::validate() const {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };

  try {
    geometry.validate();
  } catch (const PreconditionError& e) {
    problems.emplace_back(e.what());
  }
  const std::size_t n = geometry.sensor_ids.size();
  check(n >= 3, "geometry: at least 3 sensors are needed to localize");

  check(drift_ppm.size() == n, "clock.drift_ppm: expected " + std::to_string(n) +
                                   " values, got " + std::to_string(drift_ppm.size()));
  for (std::size_t i = 0; i < drift_ppm.size(); ++i) {
    check(std::isfinite(drift_ppm[i]) && std::abs(drift_ppm[i]) <= max_abs_drift_ppm,
          "clock.drift_ppm[" + std::to_string(i) + "]: " + std::to_string(drift_ppm[i]) +
              " outside +/-" + std::to_string(max_abs_drift_ppm));
  }

  check(wave.wave_speed_m_s > 0.0, "wave.wave_speed_m_s: must be positive");
  check(wave.threshold_g > 0.0, "wave.threshold_g: must be positive");
  check(wave.window_us > 0.0, "wave.window_us: must be positive");
  check(wave.sampling_period_ticks > 0, "wave.sampling_period_ticks: must be positive");
  check(wave.attenuation.decay_per_m >= 0.0, "wave.attenuation_per_m: must be non-negative");
  check(sync_period_T_us > 0, "sync.sync_period_T_us: must be positive");
  check(coincidence_window_us > 0.0, "sync.coincidence_window_us: must be positive");

  try {
    network.validate();
  } catch (const PreconditionError& e) {
    problems.emplace_back(e.what());
  }
  for (SensorId id : geometry.sensor_ids) {
    check(network.node_positions_m.contains(id),
          "network: no radio position for sensor " + std::to_string(id));
  }

  const bool have_extent = !geometry.sensor_positions_m.empty();
  for (std::size_t i = 0; i < ruptures.size(); ++i) {
    const auto& r = ruptures[i];
    const std::string where = "ruptures[" + std::to_string(i) + "]";
    check(have_extent && r.position_m >= geometry.min_position() &&
              r.position_m <= geometry.max_position(),
          where + ".position_m: " + std::to_string(r.position_m) + " outside cable extent");
    check(r.time_ref_us >= 0.0, where + ".time_ref_us: must be non-negative");
    check(r.peak_amplitude_g > 0.0, where + ".peak_amplitude_g: must be positive");
  }
  for (std::size_t i = 0; i < spurious_events.size(); ++i) {
    const auto& e = spurious_events[i];
    const std::string where = "spurious_events[" + std::to_string(i) + "]";
    check(geometry.index_of(e.sensor_id).has_value(),
          where + ".sensor_id: unknown sensor " + std::to_string(e.sensor_id));
    check(e.time_ref_us >= 0.0, where + ".time_ref_us: must be non-negative");
    check(e.amplitude_g > 0.0, where + ".amplitude_g: must be positive");
  }
  check(run_duration_us >= latest_activity_us() + sync_period_T_us,
        "run_duration_us: must cover all activity plus one full period");

  if (!problems.empty()) throw ScenarioError(std::move(problems));
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const auto doc = detail::parse_json_or_throw(text, source);
  std::vector<std::string> problems;
  Scenario s = detail::scenario_from_json(doc, "", problems);
  if (problems.empty()) {
    try {
      s.validate();
    } catch (const ScenarioError& e) {
      problems = e.problems();
    }
  }
  if (!problems.empty()) {
    for (auto& p : problems) p = source + ": " + p;
    throw ScenarioError(std::move(problems));
  }
  return s;
}

namespace detail {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError({path.string() + ": cannot open file"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace detail

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(detail::read_text_file(path), path.string());
}

CableGeometry load_geometry(const std::filesystem::path& path) {
  const auto doc = detail::parse_json_or_throw(detail::read_text_file(path), path.string());
  std::vector<std::string> problems;
  CableGeometry geom;
  const detail::json* node = &doc;
  if (doc.is_object() && doc.contains("geometry")) node = &doc.at("geometry");
  detail::ObjectReader reader(*node, "", problems);
  reader.number_array("sensor_positions_m", geom.sensor_positions_m, true);
  std::vector<std::uint64_t> ids;
  if (reader.unsigned_array("sensor_ids", ids, UINT16_MAX)) {
    geom.sensor_ids.assign(ids.begin(), ids.end());
  } else if (!reader.has("sensor_ids")) {
    for (std::size_t i = 0; i < geom.sensor_positions_m.size(); ++i) {
      geom.sensor_ids.push_back(static_cast<SensorId>(i));
    }
  }
  if (problems.empty()) {
    try {
      geom.validate();
    } catch (const PreconditionError& e) {
      problems.emplace_back(e.what());
    }
  }
  if (!problems.empty()) {
    for (auto& p : problems) p = path.string() + ": " + p;
    throw ScenarioError(std::move(problems));
  }
  return geom;
}

}  // namespace casc
