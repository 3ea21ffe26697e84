#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "casc/units.hpp"

namespace casc {

// Wire layout, all integers little-endian:
//
//   SyncFrame (12 bytes)
//     0  magic        "CASC"
//     4  period_index u32
//     8  period_T_us  u32
//
//   SensorReport (16 + 12 * event_count bytes)
//     0  sensor_id    u16
//     2  period_index u32
//     6  saved_counter u64
//    14  event_count  u16
//    16  event_count x { timestamp_ticks u64, amplitude_milli_g u32 }

inline constexpr std::array<std::uint8_t, 4> kSyncMagic = {'C', 'A', 'S', 'C'};
inline constexpr std::size_t kSyncFrameSize = 12;
inline constexpr std::size_t kReportHeaderSize = 16;
inline constexpr std::size_t kReportEventSize = 12;
/// Reports must fit one datagram.
inline constexpr std::size_t kMaxReportEvents = 1000;

using Bytes = std::vector<std::uint8_t>;

struct SyncFrame {
  PeriodIndex period_index = 0;
  std::uint32_t period_T_us = kDefaultSyncPeriodUs;

  friend bool operator==(const SyncFrame&, const SyncFrame&) = default;
};

struct ReportEvent {
  Ticks local_timestamp_ticks = 0;
  std::uint32_t max_amplitude_milli_g = 0;

  friend bool operator==(const ReportEvent&, const ReportEvent&) = default;
};

struct SensorReport {
  SensorId sensor_id = 0;
  PeriodIndex period_index = 0;
  Ticks saved_counter_T_i = 0;
  std::vector<ReportEvent> events;

  friend bool operator==(const SensorReport&, const SensorReport&) = default;
};

enum class WireErrorKind { kTruncated, kBadMagic, kCountMismatch, kOversize };

class WireError : public std::runtime_error {
 public:
  WireError(WireErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  WireErrorKind kind() const noexcept { return kind_; }

 private:
  WireErrorKind kind_;
};

Bytes encode_sync(const SyncFrame& frame);
SyncFrame decode_sync(std::span<const std::uint8_t> bytes);

/// Throws WireError(kOversize) when the report carries more than
/// kMaxReportEvents events.
Bytes encode_report(const SensorReport& report);
SensorReport decode_report(std::span<const std::uint8_t> bytes);

/// Amplitude conversion used at the wire boundary.
std::uint32_t to_milli_g(double amplitude_g);
inline double from_milli_g(std::uint32_t milli_g) { return milli_g / 1000.0; }

}  // namespace casc
