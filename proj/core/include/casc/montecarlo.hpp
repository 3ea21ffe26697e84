#pragma once

#include <cstdint>
#include <vector>

#include "casc/scenario.hpp"

namespace casc {

/// Randomized accuracy study around a base scenario. Each trial keeps the
/// base geometry, wave and network parameters and draws:
///   - per-sensor drift uniform in [-max_drift_ppm, +max_drift_ppm]
///   - processing latency jitter of +-jitter_us on every sync receipt
///   - one rupture uniform over the cable, uniform in time within the
///     second sync period
struct MonteCarloConfig {
  std::uint32_t trials = 1000;
  double jitter_us = 3.0;
  double max_drift_ppm = 50.0;
  std::uint64_t seed = 0;
};

struct MonteCarloResult {
  /// Absolute position error per trial, in trial order. A trial that
  /// produced no usable estimate records +infinity.
  std::vector<double> errors_m;
  std::uint32_t failures = 0;
  double p50_m = 0.0;
  double p99_m = 0.0;
  double max_m = 0.0;
};

/// Nearest-rank percentile, q in (0, 100]. Throws PreconditionError on an
/// empty sample.
double nearest_rank_percentile(std::vector<double> values, double q);

/// The scenario actually simulated for `trial`. Pure in (base, config, trial).
Scenario monte_carlo_trial(const Scenario& base, const MonteCarloConfig& config,
                           std::uint32_t trial);

MonteCarloResult run_monte_carlo(const Scenario& base, const MonteCarloConfig& config);

}  // namespace casc
