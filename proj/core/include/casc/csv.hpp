#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "casc/retiming.hpp"
#include "casc/simulation.hpp"

namespace casc {

// Column layouts. Numbers use the shortest representation that round-trips
// a double; absent values are empty fields.
inline constexpr const char* kDetectionsHeader =
    "sensor_id,source,arrival_ref_us,local_timestamp_ticks,open_period,max_amplitude_g";
inline constexpr const char* kRetimedHeader =
    "period_index,sensor_id,raw_local_ticks,saved_counter_ticks,retimed_us,max_amplitude_g,"
    "status,cluster_id,source";
inline constexpr const char* kEstimatesHeader =
    "period_index,cluster_id,cluster_size,s1,s2,s3,x_est_m,v_est_m_s,x_true_m,error_m,flags,"
    "source";
inline constexpr const char* kSummaryHeader = "metric,value";

/// Shortest round-trip decimal form of `value`.
std::string format_double(double value);

std::string detections_csv(const RunReport& report);
std::string retimed_csv(const RunReport& report);
std::string estimates_csv(const RunReport& report);
std::string summary_csv(const RunReport& report);

/// Writes detections.csv, retimed.csv, estimates.csv and summary.csv into
/// `dir`, creating it if needed. Throws std::runtime_error when a file
/// cannot be written.
void export_csv(const RunReport& report, const std::filesystem::path& dir);

/// Reads a retimed.csv back. Only the retiming columns are required;
/// cluster and source columns are ignored.
std::vector<RetimedEvent> read_retimed_csv(const std::filesystem::path& path);

}  // namespace casc
