#include "casc/transport.hpp"

#include <cmath>
#include <random>
#include <string>
#include <tuple>

#include "casc/clock.hpp"

namespace casc {

NetworkModel NetworkModel::from_geometry(const CableGeometry& geom) {
  NetworkModel model;
  model.supervisor_position_m = geom.sensor_positions_m.empty() ? 0.0 : geom.min_position();
  for (std::size_t i = 0; i < geom.size(); ++i) {
    model.node_positions_m[geom.sensor_ids[i]] = geom.sensor_positions_m[i];
  }
  return model;
}

void NetworkModel::validate() const {
  if (!(rf_speed_m_s > 0.0)) throw PreconditionError("network: rf speed must be positive");
  if (!(processing_latency_jitter_us >= 0.0)) {
    throw PreconditionError("network: jitter must be non-negative");
  }
  if (!(processing_latency_mean_us >= processing_latency_jitter_us)) {
    throw PreconditionError("network: latency mean must cover the jitter half-width");
  }
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw PreconditionError("network: drop probability must lie in [0, 1]");
  }
}

double NetworkModel::position_of(NodeId node) const {
  if (node == kSupervisorNode) return supervisor_position_m;
  if (node >= 0) {
    auto it = node_positions_m.find(static_cast<SensorId>(node));
    if (it != node_positions_m.end()) return it->second;
  }
  throw PreconditionError("network: unknown node " + std::to_string(node));
}

double propagation_delay(const NetworkModel& model, NodeId from, NodeId to) {
  const double distance = std::abs(model.position_of(to) - model.position_of(from));
  return distance / model.rf_speed_m_s * kMicrosPerSecond;
}

double keyed_uniform(const NetworkModel& model, DrawStream stream, PeriodIndex period,
                     NodeId node) {
  // seed_seq and mt19937_64 are fully specified, so draws match across platforms.
  std::seed_seq seq{static_cast<std::uint32_t>(model.seed),
                    static_cast<std::uint32_t>(model.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(period),
                    static_cast<std::uint32_t>(node + 1)};
  std::mt19937_64 engine(seq);
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double processing_latency(const NetworkModel& model, DrawStream stream, PeriodIndex period,
                          NodeId node) {
  const double jitter = model.processing_latency_jitter_us;
  if (jitter == 0.0) return model.processing_latency_mean_us;
  const double u = keyed_uniform(model, stream, period, node);
  return model.processing_latency_mean_us + jitter * (2.0 * u - 1.0);
}

namespace {

bool is_dropped(const NetworkModel& model, DrawStream stream, PeriodIndex period, NodeId node) {
  if (model.drop_probability <= 0.0) return false;
  return keyed_uniform(model, stream, period, node) < model.drop_probability;
}

}  // namespace

std::vector<ScheduledDelivery> broadcast(const NetworkModel& model, const Bytes& frame,
                                         double now_ref_us, PeriodIndex period) {
  std::vector<ScheduledDelivery> out;
  for (const auto& [id, position] : model.node_positions_m) {
    const NodeId node = id;
    if (is_dropped(model, DrawStream::kSyncDrop, period, node)) continue;
    ScheduledDelivery d;
    d.message = frame;
    d.source = kSupervisorNode;
    d.destination = node;
    d.kind = MessageKind::kSync;
    d.sent_at_ref_us = now_ref_us;
    d.deliver_at_ref_us = now_ref_us + propagation_delay(model, kSupervisorNode, node) +
                          processing_latency(model, DrawStream::kSyncLatency, period, node);
    out.push_back(std::move(d));
  }
  return out;
}

std::optional<ScheduledDelivery> send_report(const NetworkModel& model, const Bytes& report,
                                             SensorId from, double now_ref_us,
                                             PeriodIndex period) {
  const NodeId node = from;
  if (is_dropped(model, DrawStream::kReportDrop, period, node)) return std::nullopt;
  ScheduledDelivery d;
  d.message = report;
  d.source = node;
  d.destination = kSupervisorNode;
  d.kind = MessageKind::kReport;
  d.sent_at_ref_us = now_ref_us;
  d.deliver_at_ref_us = now_ref_us + propagation_delay(model, node, kSupervisorNode) +
                        processing_latency(model, DrawStream::kReportLatency, period, node);
  return d;
}

bool EventLoop::Later::operator()(const Entry& a, const Entry& b) const {
  const auto key = [](const Entry& e) {
    return std::make_tuple(e.event.at_ref_us, static_cast<int>(e.event.kind), e.event.node,
                           e.seq);
  };
  return key(a) > key(b);
}

void EventLoop::schedule(SimEvent event) {
  if (!(event.at_ref_us >= now_)) {
    throw PreconditionError("event loop: event at " + std::to_string(event.at_ref_us) +
                            " scheduled before now " + std::to_string(now_));
  }
  queue_.push(Entry{std::move(event), next_seq_++});
}

void EventLoop::schedule(const ScheduledDelivery& delivery) {
  SimEvent event;
  event.at_ref_us = delivery.deliver_at_ref_us;
  event.kind = delivery.kind == MessageKind::kSync ? EventKind::kSyncDelivery
                                                   : EventKind::kReportDelivery;
  // Reports are keyed by their sender so simultaneous arrivals order by sensor id.
  event.node = delivery.kind == MessageKind::kSync ? delivery.destination : delivery.source;
  event.payload = delivery.message;
  event.source = delivery.source;
  event.sent_at_ref_us = delivery.sent_at_ref_us;
  schedule(std::move(event));
}

void EventLoop::run(const Handler& handler) {
  while (!queue_.empty()) {
    Entry entry = queue_.top();
    queue_.pop();
    now_ = entry.event.at_ref_us;
    ++dispatched_;
    handler(entry.event, *this);
  }
}

}  // namespace casc
