#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "casc/retiming.hpp"
#include "casc/wave.hpp"

namespace casc {

enum class EstimateFlag : std::uint8_t {
  kOutOfSpan = 1 << 0,
  kDegenerateDt = 1 << 1,
  kInsufficientSensors = 1 << 2,
};

class EstimateFlags {
 public:
  constexpr EstimateFlags() = default;
  constexpr EstimateFlags(EstimateFlag flag) : bits_(static_cast<std::uint8_t>(flag)) {}

  constexpr bool has(EstimateFlag flag) const {
    return (bits_ & static_cast<std::uint8_t>(flag)) != 0;
  }
  constexpr void set(EstimateFlag flag) { bits_ |= static_cast<std::uint8_t>(flag); }
  constexpr bool empty() const { return bits_ == 0; }
  /// "OUT_OF_SPAN|DEGENERATE_DT" style; empty string when no flag is set.
  std::string to_string() const;
  static EstimateFlags parse(const std::string& text);

  friend constexpr bool operator==(EstimateFlags, EstimateFlags) = default;

 private:
  std::uint8_t bits_ = 0;
};

class LocalizationError : public std::runtime_error {
 public:
  LocalizationError(EstimateFlag flag, const std::string& what)
      : std::runtime_error(what), flag_(flag) {}
  EstimateFlag flag() const noexcept { return flag_; }

 private:
  EstimateFlag flag_;
};

/// Sensor roles: s2 and s3 bracket the rupture, s1 sits beside s2 on the far
/// side so the s1-s2 pair sees pure propagation.
struct SensorTriple {
  SensorId s1 = 0;
  SensorId s2 = 0;
  SensorId s3 = 0;

  friend bool operator==(const SensorTriple&, const SensorTriple&) = default;
};

struct RuptureEstimate {
  std::optional<double> x_est_m;
  std::optional<double> v_est_m_s;
  std::optional<SensorTriple> triple;
  EstimateFlags flags;
};

/// Picks the triple from a cluster. Ties in arrival order break on the
/// lower sensor id. When s2 is an end sensor (or its outer neighbour did not
/// detect), the roles mirror onto s3's outer neighbour. Throws
/// LocalizationError(kInsufficientSensors) when no valid triple exists.
SensorTriple select_triple(std::span<const RetimedEvent> cluster, const CableGeometry& geom);

/// v = L12 / (t_s1 - t_s2). Throws LocalizationError(kDegenerateDt) unless
/// s1 detected strictly after s2.
double estimate_speed(double t_s1_us, double t_s2_us, double spacing_12_m);

/// Offset of the rupture from s2 towards s3: (L23 - v * (t_s3 - t_s2)) / 2.
double estimate_position(double t_s2_us, double t_s3_us, double spacing_23_m, double v_m_s);

/// True when `offset_m` lies on [0, spacing_m] up to float noise.
bool within_span(double offset_m, double spacing_m);

/// select_triple, estimate_speed and estimate_position composed, with
/// failures reported through flags.
RuptureEstimate localize(std::span<const RetimedEvent> cluster, const CableGeometry& geom);

}  // namespace casc
