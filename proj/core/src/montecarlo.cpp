#include "casc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "casc/simulation.hpp"

namespace casc {

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw PreconditionError("percentile of an empty sample");
  if (!(q > 0.0 && q <= 100.0)) throw PreconditionError("percentile outside (0, 100]");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * values.size()));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

Scenario monte_carlo_trial(const Scenario& base, const MonteCarloConfig& config,
                           std::uint32_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32), trial};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scenario s = base;
  s.drift_ppm.resize(s.geometry.sensor_positions_m.size());
  for (double& d : s.drift_ppm) d = config.max_drift_ppm * (2.0 * unit(rng) - 1.0);
  s.max_abs_drift_ppm = std::max(s.max_abs_drift_ppm, config.max_drift_ppm);

  s.network.processing_latency_jitter_us = config.jitter_us;
  s.network.processing_latency_mean_us =
      std::max(s.network.processing_latency_mean_us, config.jitter_us);
  s.network.seed = rng();
  s.seed = s.network.seed;

  const double lo = s.geometry.min_position();
  const double hi = s.geometry.max_position();
  const double T = s.sync_period_T_us;
  RuptureEvent rupture;
  rupture.position_m = lo + (hi - lo) * unit(rng);
  rupture.time_ref_us = T * (1.1 + 0.7 * unit(rng));
  rupture.peak_amplitude_g = base.ruptures.empty() ? 1.0 : base.ruptures.front().peak_amplitude_g;
  s.ruptures = {rupture};
  s.spurious_events.clear();
  s.run_duration_us = 3.0 * T;
  return s;
}

MonteCarloResult run_monte_carlo(const Scenario& base, const MonteCarloConfig& config) {
  MonteCarloResult result;
  result.errors_m.reserve(config.trials);
  for (std::uint32_t trial = 0; trial < config.trials; ++trial) {
    const RunReport report = run(monte_carlo_trial(base, config, trial));
    double error = std::numeric_limits<double>::infinity();
    for (const auto& row : report.estimates) {
      if (row.source == 0 && row.error_m) error = std::min(error, std::abs(*row.error_m));
    }
    if (std::isinf(error)) ++result.failures;
    result.errors_m.push_back(error);
  }
  if (!result.errors_m.empty()) {
    result.p50_m = nearest_rank_percentile(result.errors_m, 50.0);
    result.p99_m = nearest_rank_percentile(result.errors_m, 99.0);
    result.max_m = *std::max_element(result.errors_m.begin(), result.errors_m.end());
  }
  return result;
}

}  // namespace casc
