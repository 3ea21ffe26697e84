#pragma once

#include <cstdint>

namespace casc {

/// Sensor identifier as carried on the wire.
using SensorId = std::uint16_t;

/// Sync period sequence number.
using PeriodIndex = std::uint32_t;

/// Whole local counter ticks. One tick is one nominal microsecond.
using Ticks = std::uint64_t;

inline constexpr double kMicrosPerSecond = 1e6;

// Defaults that describe the monitored installation.
inline constexpr double kDefaultWaveSpeedMps = 5000.0;
inline constexpr double kDefaultSensorSpacingM = 10.0;
inline constexpr double kDefaultThresholdG = 0.8;
inline constexpr double kDefaultWindowUs = 3000.0;
inline constexpr Ticks kDefaultSamplingPeriodTicks = 4;  // 250 kHz
inline constexpr std::uint32_t kDefaultSyncPeriodUs = 1'000'000;
inline constexpr double kDefaultRfSpeedMps = 180e6;
inline constexpr double kDefaultCoincidenceWindowUs = 100'000.0;

}  // namespace casc
