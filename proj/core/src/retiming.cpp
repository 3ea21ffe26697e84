#include "casc/retiming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "casc/clock.hpp"

namespace casc {

const char* to_string(RetimeStatus status) {
  switch (status) {
    case RetimeStatus::kOk: return "ok";
    case RetimeStatus::kZeroPeriodCounter: return "zero_period_counter";
    case RetimeStatus::kOutOfPeriod: return "out_of_period";
  }
  return "unknown";
}

double retime(double event_local_ticks, double period_local_ticks, double period_T_us) {
  if (!(period_T_us > 0.0)) throw PreconditionError("retime: period must be positive");
  if (!(period_local_ticks > 0.0)) {
    throw RetimeError(RetimeStatus::kZeroPeriodCounter, "retime: saved counter is zero");
  }
  if (event_local_ticks < 0.0 || event_local_ticks > period_local_ticks) {
    throw RetimeError(RetimeStatus::kOutOfPeriod,
                      "retime: event at " + std::to_string(event_local_ticks) +
                          " ticks outside period of " + std::to_string(period_local_ticks));
  }
  return event_local_ticks * period_T_us / period_local_ticks;
}

std::vector<RetimedEvent> align_period(std::span<const SensorReport> reports,
                                       double period_T_us) {
  std::vector<RetimedEvent> good;
  std::vector<RetimedEvent> faulted;
  for (const auto& report : reports) {
    if (report.period_index != reports.front().period_index) {
      throw PreconditionError("align_period: reports span several periods");
    }
    for (const auto& event : report.events) {
      RetimedEvent out;
      out.sensor_id = report.sensor_id;
      out.period_index = report.period_index;
      out.raw_local_ticks = event.local_timestamp_ticks;
      out.saved_counter_ticks = report.saved_counter_T_i;
      out.max_amplitude_g = from_milli_g(event.max_amplitude_milli_g);
      try {
        out.retimed_us = retime(static_cast<double>(event.local_timestamp_ticks),
                                static_cast<double>(report.saved_counter_T_i), period_T_us);
        good.push_back(out);
      } catch (const RetimeError& e) {
        out.retimed_us = std::numeric_limits<double>::quiet_NaN();
        out.status = e.status();
        faulted.push_back(out);
      }
    }
  }
  std::stable_sort(good.begin(), good.end(), [](const auto& a, const auto& b) {
    if (a.retimed_us != b.retimed_us) return a.retimed_us < b.retimed_us;
    return a.sensor_id < b.sensor_id;
  });
  std::stable_sort(faulted.begin(), faulted.end(),
                   [](const auto& a, const auto& b) { return a.sensor_id < b.sensor_id; });
  good.insert(good.end(), faulted.begin(), faulted.end());
  return good;
}

double pairwise_dt(std::span<const RetimedEvent> events, SensorId i, SensorId j) {
  auto first_of = [&](SensorId id) {
    auto it = std::find_if(events.begin(), events.end(), [&](const RetimedEvent& e) {
      return e.sensor_id == id && e.status == RetimeStatus::kOk;
    });
    if (it == events.end()) {
      throw PreconditionError("pairwise_dt: no event from sensor " + std::to_string(id));
    }
    return it->retimed_us;
  };
  return first_of(i) - first_of(j);
}

std::vector<std::vector<std::size_t>> cluster_indices(std::span<const RetimedEvent> events,
                                                      double window_us) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].status == RetimeStatus::kOk) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (events[a].retimed_us != events[b].retimed_us) {
      return events[a].retimed_us < events[b].retimed_us;
    }
    return events[a].sensor_id < events[b].sensor_id;
  });

  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i : order) {
    const RetimedEvent& e = events[i];
    bool joins = false;
    if (!clusters.empty()) {
      const auto& open = clusters.back();
      const bool in_window = e.retimed_us - events[open.front()].retimed_us <= window_us;
      const bool sensor_free = std::none_of(open.begin(), open.end(), [&](std::size_t o) {
        return events[o].sensor_id == e.sensor_id;
      });
      joins = in_window && sensor_free;
    }
    if (joins) {
      clusters.back().push_back(i);
    } else {
      clusters.push_back({i});
    }
  }
  return clusters;
}

std::vector<std::vector<RetimedEvent>> cluster_events(std::span<const RetimedEvent> events,
                                                      double window_us) {
  std::vector<std::vector<RetimedEvent>> out;
  for (const auto& indices : cluster_indices(events, window_us)) {
    auto& cluster = out.emplace_back();
    for (std::size_t i : indices) cluster.push_back(events[i]);
  }
  return out;
}

}  // namespace casc
