#include "casc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace casc {

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

namespace {

template <typename T>
std::string opt(const std::optional<T>& value) {
  if (!value) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*value);
  } else {
    return std::to_string(*value);
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string detections_csv(const RunReport& report) {
  std::string out = std::string(kDetectionsHeader) + "\n";
  for (const auto& row : report.detections) {
    out += std::to_string(row.sensor_id) + "," + source_label(row.source) + "," +
           format_double(row.arrival_ref_us) + "," + std::to_string(row.local_timestamp_ticks) +
           "," + opt(row.open_period) + "," + format_double(row.max_amplitude_g) + "\n";
  }
  return out;
}

std::string retimed_csv(const RunReport& report) {
  std::string out = std::string(kRetimedHeader) + "\n";
  for (const auto& row : report.retimed) {
    const auto& e = row.event;
    out += std::to_string(e.period_index) + "," + std::to_string(e.sensor_id) + "," +
           std::to_string(e.raw_local_ticks) + "," + std::to_string(e.saved_counter_ticks) + "," +
           format_double(e.retimed_us) + "," + format_double(e.max_amplitude_g) + "," +
           to_string(e.status) + "," + opt(row.cluster_id) + "," + source_label(row.source) +
           "\n";
  }
  return out;
}

std::string estimates_csv(const RunReport& report) {
  std::string out = std::string(kEstimatesHeader) + "\n";
  for (const auto& row : report.estimates) {
    const auto& est = row.estimate;
    std::string s1, s2, s3;
    if (est.triple) {
      s1 = std::to_string(est.triple->s1);
      s2 = std::to_string(est.triple->s2);
      s3 = std::to_string(est.triple->s3);
    }
    out += std::to_string(row.period_index) + "," + std::to_string(row.cluster_id) + "," +
           std::to_string(row.cluster_size) + "," + s1 + "," + s2 + "," + s3 + "," +
           opt(est.x_est_m) + "," + opt(est.v_est_m_s) + "," + opt(row.x_true_m) + "," +
           opt(row.error_m) + "," + est.flags.to_string() + "," + source_label(row.source) + "\n";
  }
  return out;
}

std::string summary_csv(const RunReport& report) {
  std::string out = std::string(kSummaryHeader) + "\n";
  for (const auto& [name, value] : report.summary.rows()) out += name + "," + value + "\n";
  return out;
}

void export_csv(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "detections.csv", detections_csv(report));
  write_file(dir / "retimed.csv", retimed_csv(report));
  write_file(dir / "estimates.csv", estimates_csv(report));
  write_file(dir / "summary.csv", summary_csv(report));
}

std::vector<RetimedEvent> read_retimed_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  const auto header = split(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required : {"period_index", "sensor_id", "raw_local_ticks",
                               "saved_counter_ticks", "retimed_us", "max_amplitude_g"}) {
    if (!column.contains(required)) {
      throw std::runtime_error(path.string() + ": missing column " + required);
    }
  }

  std::vector<RetimedEvent> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    auto at = [&](const char* name) -> const std::string& {
      const std::size_t i = column.at(name);
      if (i >= fields.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": too few fields");
      }
      return fields[i];
    };
    try {
      RetimedEvent e;
      e.period_index = static_cast<PeriodIndex>(std::stoul(at("period_index")));
      e.sensor_id = static_cast<SensorId>(std::stoul(at("sensor_id")));
      e.raw_local_ticks = std::stoull(at("raw_local_ticks"));
      e.saved_counter_ticks = std::stoull(at("saved_counter_ticks"));
      e.max_amplitude_g = std::stod(at("max_amplitude_g"));
      const std::string& retimed = at("retimed_us");
      if (retimed.empty()) {
        e.retimed_us = std::numeric_limits<double>::quiet_NaN();
        e.status = RetimeStatus::kOutOfPeriod;
        if (column.contains("status") && at("status") == to_string(RetimeStatus::kZeroPeriodCounter)) {
          e.status = RetimeStatus::kZeroPeriodCounter;
        }
      } else {
        e.retimed_us = std::stod(retimed);
      }
      events.push_back(e);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed number");
    } catch (const std::out_of_range&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": number out of range");
    }
  }
  return events;
}

}  // namespace casc
