#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "casc/units.hpp"
#include "casc/wave.hpp"
#include "casc/wire.hpp"

namespace casc {

/// Radio node: a sensor id, or the supervisor.
using NodeId = std::int32_t;
inline constexpr NodeId kSupervisorNode = -1;

inline constexpr double kDefaultProcessingLatencyUs = 20.0;
inline constexpr double kDefaultProcessingJitterUs = 1.0;

/// Simulated LAN: rf propagation plus a per-node "take note" latency drawn
/// as mean + uniform jitter. Every draw is a pure function of
/// (seed, stream, period, node).
struct NetworkModel {
  double rf_speed_m_s = kDefaultRfSpeedMps;
  double supervisor_position_m = 0.0;
  std::map<SensorId, double> node_positions_m;
  double processing_latency_mean_us = kDefaultProcessingLatencyUs;
  double processing_latency_jitter_us = kDefaultProcessingJitterUs;
  double drop_probability = 0.0;
  std::uint64_t seed = 0;

  /// Radio positions equal to cable positions, supervisor at the cable start.
  static NetworkModel from_geometry(const CableGeometry& geom);

  void validate() const;
  /// Throws PreconditionError for unknown nodes.
  double position_of(NodeId node) const;
};

enum class MessageKind : std::uint8_t { kSync, kReport };

struct ScheduledDelivery {
  Bytes message;
  NodeId source = kSupervisorNode;
  NodeId destination = kSupervisorNode;
  double sent_at_ref_us = 0.0;
  double deliver_at_ref_us = 0.0;
  MessageKind kind = MessageKind::kSync;
};

double propagation_delay(const NetworkModel& model, NodeId from, NodeId to);

/// Independent draw streams.
enum class DrawStream : std::uint64_t { kSyncLatency, kReportLatency, kSyncDrop, kReportDrop };

/// Uniform [0, 1) draw keyed by (model.seed, stream, period, node).
double keyed_uniform(const NetworkModel& model, DrawStream stream, PeriodIndex period,
                     NodeId node);

double processing_latency(const NetworkModel& model, DrawStream stream, PeriodIndex period,
                          NodeId node);

/// One delivery per sensor, in ascending sensor id order. Dropped copies
/// are omitted.
std::vector<ScheduledDelivery> broadcast(const NetworkModel& model, const Bytes& frame,
                                         double now_ref_us, PeriodIndex period);

/// Sensor-to-supervisor report delivery, or nothing if dropped.
std::optional<ScheduledDelivery> send_report(const NetworkModel& model, const Bytes& report,
                                             SensorId from, double now_ref_us,
                                             PeriodIndex period);

// Event loop ----------------------------------------------------------------

/// Dispatch rank for simultaneous events. Sync deliveries precede reports.
enum class EventKind : std::uint8_t {
  kSupervisorTick = 0,
  kSyncDelivery = 1,
  kDetection = 2,
  kReportDelivery = 3,
  kPeriodTimeout = 4,
};

struct SimEvent {
  double at_ref_us = 0.0;
  EventKind kind = EventKind::kSupervisorTick;
  NodeId node = kSupervisorNode;
  /// Free-form key for timers (period index, detection slot, ...).
  std::uint64_t tag = 0;
  Bytes payload;
  NodeId source = kSupervisorNode;
  double sent_at_ref_us = 0.0;
};

/// Single-threaded discrete-event loop. Reference time only advances here.
class EventLoop {
 public:
  using Handler = std::function<void(const SimEvent&, EventLoop&)>;

  /// Throws PreconditionError if the event lies in the past.
  void schedule(SimEvent event);
  void schedule(const ScheduledDelivery& delivery);

  /// Dispatches in (time, kind, node, insertion) order until empty.
  void run(const Handler& handler);

  double now() const { return now_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct Entry {
    SimEvent event;
    std::uint64_t seq;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const;
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
};

}  // namespace casc
