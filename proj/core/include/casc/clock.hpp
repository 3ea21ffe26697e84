#pragma once

#include <stdexcept>
#include <utility>

#include "casc/units.hpp"

namespace casc {

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultMaxAbsDriftPpm = 1000.0;

/// A quartz-driven local counter with a constant rate error.
///
/// The counter runs at (1 + drift_ppm * 1e-6) ticks per reference
/// microsecond. Fractional ticks are carried in `counter_ticks`; the
/// hardware-visible value is `whole_ticks(counter_ticks)`.
struct ClockState {
  double drift_ppm = 0.0;
  double counter_ticks = 0.0;
  /// Reference time the counter value is valid at.
  double ref_now_us = 0.0;
  double last_reset_ref_us = 0.0;

  friend bool operator==(const ClockState&, const ClockState&) = default;
};

/// Creates a clock at reference time `start_ref_us` with a zero counter.
/// Rejects |drift_ppm| above `max_abs_drift_ppm`.
ClockState make_clock(double drift_ppm, double start_ref_us = 0.0,
                      double max_abs_drift_ppm = kDefaultMaxAbsDriftPpm);

/// Runs the clock forward by `ref_dt_us` reference microseconds.
ClockState advance(ClockState clock, double ref_dt_us);

/// Runs the clock forward to absolute reference time `ref_us`.
ClockState advance_to(ClockState clock, double ref_us);

/// Returns the pre-reset counter and the clock with its counter at zero.
std::pair<double, ClockState> save_and_reset(ClockState clock);

inline double read_counter(const ClockState& clock) { return clock.counter_ticks; }

/// Integer part of a fractional counter. Values within 1e-6 tick below an
/// integer are treated as that integer so accumulated rounding never loses
/// a whole tick.
Ticks whole_ticks(double counter_ticks);

}  // namespace casc
