#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casc/scenario.hpp"
#include "casc/simulation.hpp"
#include "casc/wire.hpp"

namespace casc {

class LiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference wall time in microseconds (CLOCK_REALTIME, the clock the
/// kernel uses for receive timestamps).
double wall_now_us();

/// IPv4 datagram socket. Move-only; closes on destruction.
class UdpSocket {
 public:
  struct Options {
    bool reuse_port = false;       // SO_REUSEADDR + SO_REUSEPORT
    bool broadcast = false;        // SO_BROADCAST
    bool kernel_timestamps = false;  // SO_TIMESTAMPNS
  };

  struct Datagram {
    Bytes payload;
    /// Kernel receive time when available, else the time recv returned.
    double received_us = 0.0;
    std::string from_address;
    std::uint16_t from_port = 0;
  };

  /// Largest payload a single IPv4 UDP datagram can carry.
  static constexpr std::size_t kMaxPayload = 65507;

  UdpSocket();
  explicit UdpSocket(Options options);
  ~UdpSocket();
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  /// Throws LiveError on failure. Port 0 picks an ephemeral port.
  void bind(const std::string& address, std::uint16_t port);
  std::uint16_t local_port() const;

  /// Throws LiveError for oversize payloads and send failures.
  void send_to(const Bytes& payload, const std::string& address, std::uint16_t port) const;

  /// Waits up to `timeout` for one datagram.
  std::optional<Datagram> receive(std::chrono::microseconds timeout) const;

 private:
  int fd_ = -1;
};

/// Deployment description shared by the supervisor and every agent.
///
///   {
///     "sync_address": "255.255.255.255", "sync_port": 47801,
///     "supervisor_address": "127.0.0.1", "report_port": 47802,
///     "roster": [0, 1, 2, 3], "periods": 5, "startup_delay_us": 500000,
///     "scenario": {...} or "path/relative/to/config.json"
///   }
///
/// The scenario supplies T, geometry, drifts and the injected ruptures.
struct LiveConfig {
  std::string sync_address = "255.255.255.255";
  std::uint16_t sync_port = 47801;
  std::string supervisor_address = "127.0.0.1";
  std::uint16_t report_port = 47802;
  /// Defaults to every sensor in the scenario geometry.
  std::vector<SensorId> roster;
  std::uint32_t periods = 5;
  /// Delay between supervisor start and the first sync frame.
  double startup_delay_us = 500000.0;
  Scenario scenario;

  /// Throws ScenarioError listing every problem.
  void validate() const;
};

LiveConfig parse_live_config(const std::string& text, const std::string& source = "<config>",
                             const std::filesystem::path& base_dir = {});
LiveConfig load_live_config(const std::filesystem::path& path);

struct LiveSupervisorResult {
  std::vector<PeriodResult> periods;
  std::uint64_t frames_sent = 0;
  std::uint64_t reports_received = 0;
  std::vector<std::string> diagnostics;
};

/// Broadcasts sync frames on schedule, collects reports and processes each
/// released period. Single threaded: receiving and state handling share one
/// loop, so the state machine has exactly one writer.
class LiveSupervisor {
 public:
  /// Binds the report socket; throws LiveError on bind failure.
  explicit LiveSupervisor(LiveConfig config);

  /// Sends frames 0..periods, then waits until every period is released.
  /// `on_period` is invoked for each released period as it happens.
  LiveSupervisorResult run(const std::function<void(const PeriodResult&)>& on_period = {});

 private:
  LiveConfig config_;
  UdpSocket reports_;
  UdpSocket sync_;
};

struct LiveAgentResult {
  std::uint64_t frames_received = 0;
  std::uint64_t reports_sent = 0;
  std::uint64_t detections = 0;
  std::vector<std::string> diagnostics;
};

/// One sensor. Its counter is the scenario's drifting clock on a reference
/// timeline anchored at the first frame received; rupture arrivals from the
/// scenario are injected on that timeline and timestamped just before the
/// next frame is handled.
class LiveAgent {
 public:
  /// Binds the shared sync port; throws LiveError on bind failure and
  /// PreconditionError for a sensor absent from the geometry.
  LiveAgent(LiveConfig config, SensorId sensor_id);

  /// Runs until the frame closing the last period has been handled, or
  /// until no frame arrives for `idle_timeout`.
  LiveAgentResult run(std::chrono::microseconds idle_timeout = std::chrono::seconds(5));

 private:
  LiveConfig config_;
  SensorId sensor_id_;
  UdpSocket sync_;
  UdpSocket reports_;
};

}  // namespace casc
