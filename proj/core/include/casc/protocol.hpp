#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "casc/clock.hpp"
#include "casc/units.hpp"
#include "casc/wire.hpp"

namespace casc {

// Sensor side ---------------------------------------------------------------

struct SensorDiagnostics {
  std::uint64_t dropped_frames = 0;    // regressions and gaps in period_index
  std::uint64_t discarded_events = 0;  // events lost to a resynchronization
  std::uint64_t carried_events = 0;    // sampled after the counter reset
};

struct SensorSyncState {
  SensorId sensor_id = 0;
  ClockState clock;
  /// Events timed within the currently open period.
  std::vector<ReportEvent> pending_events;
  /// Events timed against the power-on counter, held until the first report.
  std::vector<ReportEvent> pre_sync_events;
  std::optional<PeriodIndex> last_seen_period_index;
  SensorDiagnostics diagnostics;
};

struct SyncOutcome {
  std::optional<SensorReport> report;
  /// Power-on events that ride along with the first report. Not retimeable.
  std::vector<ReportEvent> flushed_pre_sync;
  /// Events dropped because the period they belong to cannot be closed.
  std::vector<ReportEvent> discarded;
  /// Set when the frame did not follow the last seen index.
  std::optional<std::string> diagnostic;
};

SensorSyncState make_sensor(SensorId id, ClockState clock);

/// Saves and resets the counter, closes the open period and reports it.
///
/// The first frame ever received only resets. A frame whose index does not
/// follow the last seen one resynchronizes to the new index without a report.
std::pair<SyncOutcome, SensorSyncState> sensor_on_sync(SensorSyncState state,
                                                      const SyncFrame& frame);

/// Appends a locally timestamped detection to the open period.
SensorSyncState sensor_on_detection(SensorSyncState state, Ticks local_timestamp_ticks,
                                    double max_amplitude_g);

// Supervisor side -----------------------------------------------------------

struct SupervisorState {
  double start_ref_us = 0.0;
  std::uint32_t period_T_us = kDefaultSyncPeriodUs;
  PeriodIndex next_period_index = 0;
  std::set<SensorId> roster;
  std::map<PeriodIndex, std::map<SensorId, SensorReport>> open_periods;
  std::set<PeriodIndex> closed_periods;
  std::uint64_t skipped_broadcasts = 0;
};

SupervisorState make_supervisor(std::set<SensorId> roster, std::uint32_t period_T_us,
                                double start_ref_us = 0.0);

/// Emits the frame for the latest schedule point `now` has reached, if it
/// has not been emitted yet. Missed schedule points are skipped, never sent
/// late, since a late frame would lengthen the period seen by every sensor.
std::pair<std::optional<SyncFrame>, SupervisorState> supervisor_tick(SupervisorState state,
                                                                     double now_ref_us);

enum class ReportDisposition { kAccepted, kDuplicate, kUnknownSensor, kLate };

struct PeriodComplete {
  PeriodIndex period_index = 0;
  /// Sorted by sensor id.
  std::vector<SensorReport> reports;
  /// False when released by the timeout with roster members missing.
  bool roster_complete = false;
};

struct ReportOutcome {
  ReportDisposition disposition = ReportDisposition::kAccepted;
  std::optional<PeriodComplete> completed;
  std::optional<std::string> diagnostic;
};

std::pair<ReportOutcome, SupervisorState> supervisor_on_report(SupervisorState state,
                                                               SensorReport report);

/// Reference time after which period `period` is released incomplete:
/// half a period after the broadcast that closes it.
double completion_deadline(const SupervisorState& state, PeriodIndex period);

/// Releases `period` with whatever reports arrived. Returns nothing if the
/// period was already released.
std::pair<std::optional<PeriodComplete>, SupervisorState> supervisor_expire(SupervisorState state,
                                                                            PeriodIndex period);

}  // namespace casc
