#include "casc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace casc {

SensorSyncState make_sensor(SensorId id, ClockState clock) {
  SensorSyncState state;
  state.sensor_id = id;
  state.clock = clock;
  return state;
}

std::pair<SyncOutcome, SensorSyncState> sensor_on_sync(SensorSyncState state,
                                                      const SyncFrame& frame) {
  SyncOutcome outcome;
  auto [saved, clock] = save_and_reset(state.clock);
  state.clock = clock;

  if (!state.last_seen_period_index) {
    // Nothing to report yet. Power-on events wait for the first report.
    state.pre_sync_events = std::move(state.pending_events);
    state.pending_events.clear();
    state.last_seen_period_index = frame.period_index;
    return {std::move(outcome), std::move(state)};
  }

  const PeriodIndex last = *state.last_seen_period_index;
  if (frame.period_index != last + 1) {
    outcome.diagnostic = "sensor " + std::to_string(state.sensor_id) + ": sync " +
                         std::to_string(frame.period_index) + " after " + std::to_string(last) +
                         ", resynchronizing";
    ++state.diagnostics.dropped_frames;
    state.diagnostics.discarded_events += state.pending_events.size();
    outcome.discarded = std::move(state.pending_events);
    state.pending_events.clear();
    state.last_seen_period_index = frame.period_index;
    return {std::move(outcome), std::move(state)};
  }

  SensorReport report;
  report.sensor_id = state.sensor_id;
  report.period_index = last;
  report.saved_counter_T_i = whole_ticks(saved);

  std::vector<ReportEvent> carried;
  for (const auto& event : state.pending_events) {
    if (event.local_timestamp_ticks <= report.saved_counter_T_i) {
      report.events.push_back(event);
    } else {
      // The sample fell after the reset: it is the first sample of the new period.
      carried.push_back({0, event.max_amplitude_milli_g});
    }
  }
  state.diagnostics.carried_events += carried.size();
  state.pending_events = std::move(carried);

  outcome.report = std::move(report);
  outcome.flushed_pre_sync = std::move(state.pre_sync_events);
  state.pre_sync_events.clear();
  state.last_seen_period_index = frame.period_index;
  return {std::move(outcome), std::move(state)};
}

SensorSyncState sensor_on_detection(SensorSyncState state, Ticks local_timestamp_ticks,
                                    double max_amplitude_g) {
  state.pending_events.push_back({local_timestamp_ticks, to_milli_g(max_amplitude_g)});
  return state;
}

SupervisorState make_supervisor(std::set<SensorId> roster, std::uint32_t period_T_us,
                                double start_ref_us) {
  if (period_T_us == 0) throw PreconditionError("supervisor: period must be positive");
  SupervisorState state;
  state.roster = std::move(roster);
  state.period_T_us = period_T_us;
  state.start_ref_us = start_ref_us;
  return state;
}

std::pair<std::optional<SyncFrame>, SupervisorState> supervisor_tick(SupervisorState state,
                                                                     double now_ref_us) {
  const double period = state.period_T_us;
  const double due = state.start_ref_us + period * state.next_period_index;
  if (now_ref_us < due) return {std::nullopt, std::move(state)};

  auto latest = static_cast<PeriodIndex>(std::floor((now_ref_us - state.start_ref_us) / period));
  latest = std::max(latest, state.next_period_index);
  state.skipped_broadcasts += latest - state.next_period_index;
  state.next_period_index = latest + 1;
  return {SyncFrame{latest, state.period_T_us}, std::move(state)};
}

namespace {

PeriodComplete release(SupervisorState& state, PeriodIndex period) {
  PeriodComplete done;
  done.period_index = period;
  if (auto it = state.open_periods.find(period); it != state.open_periods.end()) {
    for (auto& [id, report] : it->second) done.reports.push_back(std::move(report));
    state.open_periods.erase(it);
  }
  done.roster_complete = done.reports.size() == state.roster.size();
  state.closed_periods.insert(period);
  return done;
}

}  // namespace

std::pair<ReportOutcome, SupervisorState> supervisor_on_report(SupervisorState state,
                                                               SensorReport report) {
  ReportOutcome outcome;
  const auto sensor = report.sensor_id;
  const auto period = report.period_index;
  if (!state.roster.contains(sensor)) {
    outcome.disposition = ReportDisposition::kUnknownSensor;
    outcome.diagnostic = "report from unknown sensor " + std::to_string(sensor);
    return {std::move(outcome), std::move(state)};
  }
  if (state.closed_periods.contains(period)) {
    outcome.disposition = ReportDisposition::kLate;
    outcome.diagnostic = "late report from sensor " + std::to_string(sensor) + " for period " +
                         std::to_string(period);
    return {std::move(outcome), std::move(state)};
  }
  auto& filed = state.open_periods[period];
  if (filed.contains(sensor)) {
    outcome.disposition = ReportDisposition::kDuplicate;
    outcome.diagnostic = "duplicate report from sensor " + std::to_string(sensor) +
                         " for period " + std::to_string(period);
    return {std::move(outcome), std::move(state)};
  }
  filed.emplace(sensor, std::move(report));
  if (filed.size() == state.roster.size()) outcome.completed = release(state, period);
  return {std::move(outcome), std::move(state)};
}

double completion_deadline(const SupervisorState& state, PeriodIndex period) {
  const double T = state.period_T_us;
  return state.start_ref_us + T * (static_cast<double>(period) + 1.0) + 0.5 * T;
}

std::pair<std::optional<PeriodComplete>, SupervisorState> supervisor_expire(SupervisorState state,
                                                                            PeriodIndex period) {
  if (state.closed_periods.contains(period)) return {std::nullopt, std::move(state)};
  auto done = release(state, period);
  return {std::move(done), std::move(state)};
}

}  // namespace casc
