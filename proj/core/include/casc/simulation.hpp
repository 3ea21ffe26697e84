#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "casc/localization.hpp"
#include "casc/protocol.hpp"
#include "casc/retiming.hpp"
#include "casc/scenario.hpp"

namespace casc {

/// Ground-truth origin of a detection: a rupture index, or one of these.
inline constexpr std::int32_t kSpuriousSource = -1;
inline constexpr std::int32_t kUnknownSource = -2;

std::string source_label(std::int32_t source);

/// Supervisor-side handling of one released period: retime, cluster,
/// localize each cluster.
struct PeriodResult {
  PeriodIndex period_index = 0;
  bool roster_complete = false;
  std::vector<RetimedEvent> retimed;
  /// Cluster index per retimed event; empty for faulted events.
  std::vector<std::optional<std::size_t>> cluster_of;
  /// Indices into `retimed`, one list per cluster.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<RuptureEstimate> estimates;
};

PeriodResult process_period(const PeriodComplete& period, double period_T_us,
                            const CableGeometry& geom, double coincidence_window_us);

struct DetectionRow {
  SensorId sensor_id = 0;
  std::int32_t source = kUnknownSource;
  double arrival_ref_us = 0.0;
  Ticks local_timestamp_ticks = 0;
  /// Period the detection was timed in; empty before the first sync.
  std::optional<PeriodIndex> open_period;
  double max_amplitude_g = 0.0;
};

struct RetimedRow {
  RetimedEvent event;
  std::optional<std::size_t> cluster_id;
  std::int32_t source = kUnknownSource;
};

struct EstimateRow {
  PeriodIndex period_index = 0;
  std::size_t cluster_id = 0;
  std::size_t cluster_size = 0;
  RuptureEstimate estimate;
  std::int32_t source = kUnknownSource;
  std::optional<double> x_true_m;
  std::optional<double> error_m;
};

struct RunSummary {
  std::uint64_t ruptures = 0;
  std::uint64_t detections = 0;
  std::uint64_t events_reported = 0;
  std::uint64_t pre_sync_events = 0;
  std::uint64_t discarded_events = 0;
  std::uint64_t carried_events = 0;
  std::uint64_t unreported_at_end = 0;
  std::uint64_t events_retimed = 0;
  std::uint64_t events_faulted = 0;
  std::uint64_t events_late = 0;
  std::uint64_t events_lost_in_transit = 0;
  std::uint64_t events_duplicate = 0;
  std::uint64_t sync_broadcasts = 0;
  std::uint64_t sync_deliveries = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t reports_delivered = 0;
  std::uint64_t reports_lost = 0;
  std::uint64_t reports_late = 0;
  std::uint64_t reports_duplicate = 0;
  std::uint64_t reports_rejected = 0;
  std::uint64_t messages_exchanged = 0;
  std::uint64_t periods_completed = 0;
  std::uint64_t periods_incomplete = 0;
  std::uint64_t estimates = 0;
  std::uint64_t estimates_flagged = 0;
  std::uint64_t spurious_estimates = 0;
  double mean_abs_error_m = 0.0;
  double max_abs_error_m = 0.0;

  /// Name/value pairs in a fixed order, as exported.
  std::vector<std::pair<std::string, std::string>> rows() const;
};

struct RunReport {
  std::vector<DetectionRow> detections;
  std::vector<RetimedRow> retimed;
  std::vector<EstimateRow> estimates;
  RunSummary summary;
  std::vector<std::string> diagnostics;
};

/// Full deterministic pipeline: ruptures -> sensor clocks -> sync periods
/// over the simulated LAN -> retiming -> clustering -> localization.
/// Validates the scenario first.
RunReport run(const Scenario& scenario);

}  // namespace casc
