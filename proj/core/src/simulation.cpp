#include "casc/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

#include "casc/transport.hpp"

namespace casc {

std::string source_label(std::int32_t source) {
  if (source == kSpuriousSource) return "spurious";
  if (source < 0) return "unknown";
  return std::to_string(source);
}

PeriodResult process_period(const PeriodComplete& period, double period_T_us,
                            const CableGeometry& geom, double coincidence_window_us) {
  PeriodResult result;
  result.period_index = period.period_index;
  result.roster_complete = period.roster_complete;
  result.retimed = align_period(period.reports, period_T_us);
  result.cluster_of.assign(result.retimed.size(), std::nullopt);
  result.clusters = cluster_indices(result.retimed, coincidence_window_us);
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    std::vector<RetimedEvent> members;
    for (std::size_t i : result.clusters[c]) {
      result.cluster_of[i] = c;
      members.push_back(result.retimed[i]);
    }
    result.estimates.push_back(localize(members, geom));
  }
  return result;
}

std::vector<std::pair<std::string, std::string>> RunSummary::rows() const {
  auto num = [](double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
  };
  return {
      {"ruptures", std::to_string(ruptures)},
      {"detections", std::to_string(detections)},
      {"events_reported", std::to_string(events_reported)},
      {"pre_sync_events", std::to_string(pre_sync_events)},
      {"discarded_events", std::to_string(discarded_events)},
      {"carried_events", std::to_string(carried_events)},
      {"unreported_at_end", std::to_string(unreported_at_end)},
      {"events_retimed", std::to_string(events_retimed)},
      {"events_faulted", std::to_string(events_faulted)},
      {"events_late", std::to_string(events_late)},
      {"events_lost_in_transit", std::to_string(events_lost_in_transit)},
      {"events_duplicate", std::to_string(events_duplicate)},
      {"sync_broadcasts", std::to_string(sync_broadcasts)},
      {"sync_deliveries", std::to_string(sync_deliveries)},
      {"reports_sent", std::to_string(reports_sent)},
      {"reports_delivered", std::to_string(reports_delivered)},
      {"reports_lost", std::to_string(reports_lost)},
      {"reports_late", std::to_string(reports_late)},
      {"reports_duplicate", std::to_string(reports_duplicate)},
      {"reports_rejected", std::to_string(reports_rejected)},
      {"messages_exchanged", std::to_string(messages_exchanged)},
      {"periods_completed", std::to_string(periods_completed)},
      {"periods_incomplete", std::to_string(periods_incomplete)},
      {"estimates", std::to_string(estimates)},
      {"estimates_flagged", std::to_string(estimates_flagged)},
      {"spurious_estimates", std::to_string(spurious_estimates)},
      {"mean_abs_error_m", num(mean_abs_error_m)},
      {"max_abs_error_m", num(max_abs_error_m)},
  };
}

namespace {

struct PendingDetection {
  SensorId sensor_id = 0;
  std::int32_t source = kUnknownSource;
  double arrival_ref_us = 0.0;
  double amplitude_g = 0.0;
};

class Simulator {
 public:
  explicit Simulator(const Scenario& scenario) : sc_(scenario) {
    std::set<SensorId> roster(sc_.geometry.sensor_ids.begin(), sc_.geometry.sensor_ids.end());
    supervisor_ = make_supervisor(std::move(roster), sc_.sync_period_T_us, 0.0);
    for (std::size_t i = 0; i < sc_.geometry.size(); ++i) {
      const SensorId id = sc_.geometry.sensor_ids[i];
      sensors_.emplace(id, make_sensor(id, make_clock(sc_.drift_ppm[i], 0.0,
                                                      sc_.max_abs_drift_ppm)));
      pending_sources_[id];
    }
  }

  RunReport run() {
    schedule_initial();
    loop_.run([this](const SimEvent& event, EventLoop& loop) { dispatch(event, loop); });
    finish();
    return std::move(report_);
  }

 private:
  void schedule_initial() {
    const double T = sc_.sync_period_T_us;
    const auto last = static_cast<std::uint64_t>(std::floor(sc_.run_duration_us / T));
    for (std::uint64_t k = 0; k <= last; ++k) {
      SimEvent tick;
      tick.at_ref_us = T * static_cast<double>(k);
      tick.kind = EventKind::kSupervisorTick;
      loop_.schedule(std::move(tick));
    }

    for (std::size_t r = 0; r < sc_.ruptures.size(); ++r) {
      for (const auto& record :
           simulate_rupture(sc_.geometry, sc_.ruptures[r], sc_.wave.wave_speed_m_s,
                            sc_.wave.threshold_g, sc_.wave.attenuation, sc_.wave.window_us)) {
        add_detection({record.sensor_id, static_cast<std::int32_t>(r), record.arrival_ref_us,
                       record.max_amplitude_g});
      }
    }
    for (const auto& spurious : sc_.spurious_events) {
      if (detect(spurious.time_ref_us, spurious.amplitude_g, sc_.wave.threshold_g,
                 sc_.wave.window_us)) {
        add_detection({spurious.sensor_id, kSpuriousSource, spurious.time_ref_us,
                       spurious.amplitude_g});
      }
    }
    report_.summary.ruptures = sc_.ruptures.size();
  }

  void add_detection(PendingDetection detection) {
    SimEvent event;
    event.at_ref_us = detection.arrival_ref_us;
    event.kind = EventKind::kDetection;
    event.node = detection.sensor_id;
    event.tag = detections_.size();
    detections_.push_back(detection);
    loop_.schedule(std::move(event));
  }

  void dispatch(const SimEvent& event, EventLoop& loop) {
    switch (event.kind) {
      case EventKind::kSupervisorTick: on_tick(loop); break;
      case EventKind::kSyncDelivery: on_sync(event, loop); break;
      case EventKind::kDetection: on_detection(event, loop); break;
      case EventKind::kReportDelivery: on_report(event); break;
      case EventKind::kPeriodTimeout: on_timeout(event); break;
    }
  }

  void on_tick(EventLoop& loop) {
    auto [frame, next] = supervisor_tick(std::move(supervisor_), loop.now());
    supervisor_ = std::move(next);
    if (!frame) return;
    ++report_.summary.sync_broadcasts;
    const Bytes bytes = encode_sync(*frame);
    for (const auto& delivery : broadcast(sc_.network, bytes, loop.now(), frame->period_index)) {
      loop.schedule(delivery);
    }
    if (frame->period_index >= 1) {
      SimEvent timeout;
      timeout.kind = EventKind::kPeriodTimeout;
      timeout.tag = frame->period_index - 1;
      timeout.at_ref_us = completion_deadline(supervisor_, frame->period_index - 1);
      loop.schedule(std::move(timeout));
    }
  }

  void on_sync(const SimEvent& event, EventLoop& loop) {
    ++report_.summary.sync_deliveries;
    const auto id = static_cast<SensorId>(event.node);
    auto& sensor = sensors_.at(id);
    auto& sources = pending_sources_.at(id);
    sensor.clock = advance_to(sensor.clock, loop.now());

    const SyncFrame frame = decode_sync(event.payload);
    auto [outcome, next] = sensor_on_sync(std::move(sensor), frame);
    sensor = std::move(next);
    if (outcome.diagnostic) report_.diagnostics.push_back(*outcome.diagnostic);
    report_.summary.pre_sync_events += outcome.flushed_pre_sync.size();
    report_.summary.discarded_events += outcome.discarded.size();

    // Pending events are time ordered, so the reported ones are a prefix of
    // the old pending list and the carried ones are the remaining suffix.
    std::vector<std::int32_t> old = std::move(sources);
    sources.clear();
    if (outcome.report) {
      const auto& events = outcome.report->events;
      for (std::size_t i = 0; i < events.size(); ++i) {
        truth_[{id, outcome.report->period_index, events[i].local_timestamp_ticks}].push_back(
            old[i]);
      }
      sources.assign(old.begin() + static_cast<std::ptrdiff_t>(events.size()), old.end());
    }
    if (outcome.report) {
      report_.summary.carried_events = total_carried();
      auto& report = *outcome.report;
      ++report_.summary.reports_sent;
      report_.summary.events_reported += report.events.size();
      const Bytes bytes = encode_report(report);
      if (auto delivery = send_report(sc_.network, bytes, id, loop.now(), frame.period_index)) {
        loop.schedule(*delivery);
      } else {
        ++report_.summary.reports_lost;
        report_.summary.events_lost_in_transit += report.events.size();
      }
    }
  }

  void on_detection(const SimEvent& event, EventLoop& loop) {
    const auto& detection = detections_.at(event.tag);
    auto& sensor = sensors_.at(detection.sensor_id);
    sensor.clock = advance_to(sensor.clock, loop.now());
    const Ticks stamp = quantize_to_sampling(read_counter(sensor.clock),
                                             sc_.wave.sampling_period_ticks);
    sensor = sensor_on_detection(std::move(sensor), stamp, detection.amplitude_g);
    pending_sources_.at(detection.sensor_id).push_back(detection.source);

    DetectionRow row;
    row.sensor_id = detection.sensor_id;
    row.source = detection.source;
    row.arrival_ref_us = detection.arrival_ref_us;
    row.local_timestamp_ticks = stamp;
    row.open_period = sensor.last_seen_period_index;
    row.max_amplitude_g = detection.amplitude_g;
    report_.detections.push_back(row);
    ++report_.summary.detections;
  }

  void on_report(const SimEvent& event) {
    ++report_.summary.reports_delivered;
    SensorReport decoded = decode_report(event.payload);
    const std::size_t events = decoded.events.size();
    auto [outcome, next] = supervisor_on_report(std::move(supervisor_), std::move(decoded));
    supervisor_ = std::move(next);
    if (outcome.diagnostic) report_.diagnostics.push_back(*outcome.diagnostic);
    switch (outcome.disposition) {
      case ReportDisposition::kAccepted: break;
      case ReportDisposition::kDuplicate:
        ++report_.summary.reports_duplicate;
        report_.summary.events_duplicate += events;
        break;
      case ReportDisposition::kUnknownSensor:
        ++report_.summary.reports_rejected;
        break;
      case ReportDisposition::kLate:
        ++report_.summary.reports_late;
        report_.summary.events_late += events;
        break;
    }
    if (outcome.completed) handle_period(*outcome.completed);
  }

  void on_timeout(const SimEvent& event) {
    auto [released, next] = supervisor_expire(std::move(supervisor_),
                                              static_cast<PeriodIndex>(event.tag));
    supervisor_ = std::move(next);
    if (released) handle_period(*released);
  }

  void handle_period(const PeriodComplete& period) {
    if (period.roster_complete) {
      ++report_.summary.periods_completed;
    } else {
      ++report_.summary.periods_incomplete;
      report_.diagnostics.push_back("period " + std::to_string(period.period_index) +
                                    " released with " + std::to_string(period.reports.size()) +
                                    " of " + std::to_string(supervisor_.roster.size()) +
                                    " reports");
    }
    const PeriodResult result = process_period(period, sc_.sync_period_T_us, sc_.geometry,
                                               sc_.coincidence_window_us);

    std::vector<std::int32_t> sources(result.retimed.size(), kUnknownSource);
    for (std::size_t i = 0; i < result.retimed.size(); ++i) {
      const auto& e = result.retimed[i];
      auto it = truth_.find({e.sensor_id, e.period_index, e.raw_local_ticks});
      if (it != truth_.end() && !it->second.empty()) {
        sources[i] = it->second.front();
        it->second.pop_front();
      }
      if (e.status == RetimeStatus::kOk) {
        ++report_.summary.events_retimed;
      } else {
        ++report_.summary.events_faulted;
      }
      report_.retimed.push_back({e, result.cluster_of[i], sources[i]});
    }

    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
      const auto& members = result.clusters[c];
      EstimateRow row;
      row.period_index = period.period_index;
      row.cluster_id = c;
      row.cluster_size = members.size();
      row.estimate = result.estimates[c];
      // Attribute the estimate to the source of its s2 event, the sensor
      // nearest the rupture.
      std::size_t anchor = members.front();
      if (row.estimate.triple) {
        for (std::size_t i : members) {
          if (result.retimed[i].sensor_id == row.estimate.triple->s2) {
            anchor = i;
            break;
          }
        }
      }
      row.source = sources[anchor];
      if (row.source >= 0) {
        row.x_true_m = sc_.ruptures[static_cast<std::size_t>(row.source)].position_m;
        if (row.estimate.x_est_m) row.error_m = *row.estimate.x_est_m - *row.x_true_m;
      }
      report_.estimates.push_back(row);
    }
  }

  std::uint64_t total_carried() const {
    std::uint64_t total = 0;
    for (const auto& [id, sensor] : sensors_) total += sensor.diagnostics.carried_events;
    return total;
  }

  void finish() {
    auto& summary = report_.summary;
    summary.carried_events = total_carried();
    for (const auto& [id, sensor] : sensors_) {
      summary.unreported_at_end += sensor.pending_events.size() + sensor.pre_sync_events.size();
    }
    summary.messages_exchanged = summary.sync_deliveries + summary.reports_sent;
    summary.estimates = report_.estimates.size();
    double total_error = 0.0;
    std::uint64_t with_error = 0;
    for (const auto& row : report_.estimates) {
      if (!row.estimate.flags.empty()) ++summary.estimates_flagged;
      if (row.source == kSpuriousSource) ++summary.spurious_estimates;
      if (row.error_m) {
        total_error += std::abs(*row.error_m);
        summary.max_abs_error_m = std::max(summary.max_abs_error_m, std::abs(*row.error_m));
        ++with_error;
      }
    }
    if (with_error > 0) summary.mean_abs_error_m = total_error / static_cast<double>(with_error);
  }

  const Scenario& sc_;
  EventLoop loop_;
  SupervisorState supervisor_;
  std::map<SensorId, SensorSyncState> sensors_;
  std::map<SensorId, std::vector<std::int32_t>> pending_sources_;
  std::vector<PendingDetection> detections_;
  std::map<std::tuple<SensorId, PeriodIndex, Ticks>, std::deque<std::int32_t>> truth_;
  RunReport report_;
};

}  // namespace

RunReport run(const Scenario& scenario) {
  scenario.validate();
  return Simulator(scenario).run();
}

}  // namespace casc
