#include "casc/clock.hpp"

#include <cmath>
#include <string>

namespace casc {

namespace {
constexpr double kTickSnap = 1e-6;
}  // namespace

ClockState make_clock(double drift_ppm, double start_ref_us, double max_abs_drift_ppm) {
  if (!std::isfinite(drift_ppm) || std::abs(drift_ppm) > max_abs_drift_ppm) {
    throw PreconditionError("drift_ppm " + std::to_string(drift_ppm) +
                            " outside +/-" + std::to_string(max_abs_drift_ppm));
  }
  ClockState clock;
  clock.drift_ppm = drift_ppm;
  clock.ref_now_us = start_ref_us;
  clock.last_reset_ref_us = start_ref_us;
  return clock;
}

ClockState advance(ClockState clock, double ref_dt_us) {
  if (!(ref_dt_us >= 0.0)) {
    throw PreconditionError("advance: negative reference duration " +
                            std::to_string(ref_dt_us));
  }
  // dt * ppm / 1e6 keeps integer-valued inputs exact.
  clock.counter_ticks += ref_dt_us + ref_dt_us * clock.drift_ppm / kMicrosPerSecond;
  clock.ref_now_us += ref_dt_us;
  return clock;
}

ClockState advance_to(ClockState clock, double ref_us) {
  return advance(clock, ref_us - clock.ref_now_us);
}

std::pair<double, ClockState> save_and_reset(ClockState clock) {
  const double saved = clock.counter_ticks;
  clock.counter_ticks = 0.0;
  clock.last_reset_ref_us = clock.ref_now_us;
  return {saved, clock};
}

Ticks whole_ticks(double counter_ticks) {
  if (counter_ticks <= 0.0) return 0;
  return static_cast<Ticks>(std::floor(counter_ticks + kTickSnap));
}

}  // namespace casc
