#include "casc/wire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace casc {

namespace {

template <typename T>
void put_le(Bytes& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get_le() {
    if (remaining() < sizeof(T)) {
      throw WireError(WireErrorKind::kTruncated, "truncated");
    }
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(T);
    return value;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes encode_sync(const SyncFrame& frame) {
  Bytes out(kSyncMagic.begin(), kSyncMagic.end());
  out.reserve(kSyncFrameSize);
  put_le(out, frame.period_index);
  put_le(out, frame.period_T_us);
  return out;
}

SyncFrame decode_sync(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSyncFrameSize) {
    throw WireError(WireErrorKind::kTruncated, "truncated");
  }
  if (!std::equal(kSyncMagic.begin(), kSyncMagic.end(), bytes.begin())) {
    throw WireError(WireErrorKind::kBadMagic, "bad magic");
  }
  if (bytes.size() != kSyncFrameSize) {
    throw WireError(WireErrorKind::kCountMismatch, "trailing bytes after sync frame");
  }
  Reader in(bytes.subspan(kSyncMagic.size()));
  SyncFrame frame;
  frame.period_index = in.get_le<std::uint32_t>();
  frame.period_T_us = in.get_le<std::uint32_t>();
  return frame;
}

Bytes encode_report(const SensorReport& report) {
  if (report.events.size() > kMaxReportEvents) {
    throw WireError(WireErrorKind::kOversize,
                    "report carries " + std::to_string(report.events.size()) +
                        " events, limit is " + std::to_string(kMaxReportEvents));
  }
  Bytes out;
  out.reserve(kReportHeaderSize + kReportEventSize * report.events.size());
  put_le(out, report.sensor_id);
  put_le(out, report.period_index);
  put_le(out, report.saved_counter_T_i);
  put_le(out, static_cast<std::uint16_t>(report.events.size()));
  for (const auto& event : report.events) {
    put_le(out, event.local_timestamp_ticks);
    put_le(out, event.max_amplitude_milli_g);
  }
  return out;
}

SensorReport decode_report(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  SensorReport report;
  report.sensor_id = in.get_le<std::uint16_t>();
  report.period_index = in.get_le<std::uint32_t>();
  report.saved_counter_T_i = in.get_le<std::uint64_t>();
  const auto count = in.get_le<std::uint16_t>();
  if (count > kMaxReportEvents) {
    throw WireError(WireErrorKind::kOversize,
                    "event_count " + std::to_string(count) + " above limit");
  }
  if (in.remaining() != kReportEventSize * count) {
    throw WireError(WireErrorKind::kCountMismatch,
                    "event_count " + std::to_string(count) + " does not match " +
                        std::to_string(in.remaining()) + " payload bytes");
  }
  report.events.reserve(count);
  for (std::uint16_t i = 0; i < count; ++i) {
    ReportEvent event;
    event.local_timestamp_ticks = in.get_le<std::uint64_t>();
    event.max_amplitude_milli_g = in.get_le<std::uint32_t>();
    report.events.push_back(event);
  }
  return report;
}

std::uint32_t to_milli_g(double amplitude_g) {
  const double milli = std::round(amplitude_g * 1000.0);
  if (!(milli > 0.0)) return 0;
  if (milli >= static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    return std::numeric_limits<std::uint32_t>::max();
  }
  return static_cast<std::uint32_t>(milli);
}

}  // namespace casc
