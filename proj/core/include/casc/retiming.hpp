#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "casc/units.hpp"
#include "casc/wire.hpp"

namespace casc {

enum class RetimeStatus { kOk, kZeroPeriodCounter, kOutOfPeriod };

const char* to_string(RetimeStatus status);

class RetimeError : public std::domain_error {
 public:
  RetimeError(RetimeStatus status, const std::string& what)
      : std::domain_error(what), status_(status) {}
  RetimeStatus status() const noexcept { return status_; }

 private:
  RetimeStatus status_;
};

/// A sensor-local event expressed on the supervisor's period timebase.
struct RetimedEvent {
  SensorId sensor_id = 0;
  PeriodIndex period_index = 0;
  /// Microseconds since the start of the period. NaN unless status is kOk.
  double retimed_us = 0.0;
  Ticks raw_local_ticks = 0;
  Ticks saved_counter_ticks = 0;
  double max_amplitude_g = 0.0;
  RetimeStatus status = RetimeStatus::kOk;
};

/// Ratiometric recalculation: local ticks scaled by nominal period over
/// the locally counted period. Constant-rate drift cancels exactly.
double retime(double event_local_ticks, double period_local_ticks, double period_T_us);

/// Retimes every event of one period's reports. Good events come first,
/// ordered by (retimed_us, sensor_id); faulted events follow, flagged.
std::vector<RetimedEvent> align_period(std::span<const SensorReport> reports,
                                       double period_T_us);

/// Signed difference retimed(i) - retimed(j) using each sensor's first
/// good event. Throws PreconditionError if either sensor is absent.
double pairwise_dt(std::span<const RetimedEvent> events, SensorId i, SensorId j);

/// Greedy grouping in retimed order: an event joins the open cluster when it
/// is within `window_us` of the cluster's first event and its sensor is not
/// already present; otherwise it opens a new cluster. Faulted events are
/// skipped.
std::vector<std::vector<RetimedEvent>> cluster_events(std::span<const RetimedEvent> events,
                                                      double window_us);

/// Same grouping as cluster_events, as indices into `events`.
std::vector<std::vector<std::size_t>> cluster_indices(std::span<const RetimedEvent> events,
                                                      double window_us);

}  // namespace casc
