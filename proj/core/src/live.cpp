#include "casc/live.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <ctime>
#include <limits>
#include <map>
#include <set>

#include "json_fields.hpp"
#include "scenario_json.hpp"

namespace casc {

namespace {

// Whole seconds of CLOCK_REALTIME at first use. Keeps microsecond values
// small enough that a double resolves nanoseconds.
std::int64_t epoch_seconds() {
  static const std::int64_t epoch = [] {
    timespec ts{};
    clock_gettime(CLOCK_REALTIME, &ts);
    return static_cast<std::int64_t>(ts.tv_sec);
  }();
  return epoch;
}

double to_wall_us(const timespec& ts) {
  return static_cast<double>(static_cast<std::int64_t>(ts.tv_sec) - epoch_seconds()) * 1e6 +
         static_cast<double>(ts.tv_nsec) / 1e3;
}

std::string errno_text(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

sockaddr_in make_address(const std::string& address, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (address.empty() || address == "0.0.0.0") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
  } else if (inet_pton(AF_INET, address.c_str(), &addr.sin_addr) != 1) {
    throw LiveError("invalid IPv4 address '" + address + "'");
  }
  return addr;
}

void set_flag(int fd, int level, int option, const char* name) {
  const int on = 1;
  if (setsockopt(fd, level, option, &on, sizeof on) != 0) {
    throw LiveError(errno_text(std::string("setsockopt ") + name));
  }
}

}  // namespace

double wall_now_us() {
  timespec ts{};
  clock_gettime(CLOCK_REALTIME, &ts);
  return to_wall_us(ts);
}

// UdpSocket -------------------------------------------------------------------

UdpSocket::UdpSocket() : UdpSocket(Options{}) {}

UdpSocket::UdpSocket(Options options) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw LiveError(errno_text("socket"));
  try {
    if (options.reuse_port) {
      set_flag(fd_, SOL_SOCKET, SO_REUSEADDR, "SO_REUSEADDR");
      set_flag(fd_, SOL_SOCKET, SO_REUSEPORT, "SO_REUSEPORT");
    }
    if (options.broadcast) set_flag(fd_, SOL_SOCKET, SO_BROADCAST, "SO_BROADCAST");
    if (options.kernel_timestamps) set_flag(fd_, SOL_SOCKET, SO_TIMESTAMPNS, "SO_TIMESTAMPNS");
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void UdpSocket::bind(const std::string& address, std::uint16_t port) {
  const sockaddr_in addr = make_address(address, port);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw LiveError(errno_text("bind " + address + ":" + std::to_string(port)));
  }
}

std::uint16_t UdpSocket::local_port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw LiveError(errno_text("getsockname"));
  }
  return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const Bytes& payload, const std::string& address,
                        std::uint16_t port) const {
  if (payload.size() > kMaxPayload) {
    throw LiveError("datagram of " + std::to_string(payload.size()) + " bytes exceeds " +
                    std::to_string(kMaxPayload));
  }
  const sockaddr_in addr = make_address(address, port);
  const ssize_t sent = ::sendto(fd_, payload.data(), payload.size(), 0,
                                reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
  if (sent < 0) throw LiveError(errno_text("sendto " + address + ":" + std::to_string(port)));
  if (static_cast<std::size_t>(sent) != payload.size()) throw LiveError("short datagram send");
}

std::optional<UdpSocket::Datagram> UdpSocket::receive(std::chrono::microseconds timeout) const {
  pollfd pfd{fd_, POLLIN, 0};
  // poll has millisecond resolution; round up so a short wait still waits.
  const auto ms = static_cast<int>((std::max<std::int64_t>(timeout.count(), 0) + 999) / 1000);
  const int ready = ::poll(&pfd, 1, ms);
  if (ready < 0) {
    if (errno == EINTR) return std::nullopt;
    throw LiveError(errno_text("poll"));
  }
  if (ready == 0) return std::nullopt;

  Datagram out;
  out.payload.resize(kMaxPayload);
  sockaddr_in from{};
  iovec iov{out.payload.data(), out.payload.size()};
  alignas(cmsghdr) char control[CMSG_SPACE(sizeof(timespec))];
  msghdr msg{};
  msg.msg_name = &from;
  msg.msg_namelen = sizeof from;
  msg.msg_iov = &iov;
  msg.msg_iovlen = 1;
  msg.msg_control = control;
  msg.msg_controllen = sizeof control;

  const ssize_t n = ::recvmsg(fd_, &msg, MSG_DONTWAIT);
  const double returned_at = wall_now_us();
  if (n < 0) {
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
    throw LiveError(errno_text("recvmsg"));
  }
  out.payload.resize(static_cast<std::size_t>(n));
  out.received_us = returned_at;
  for (cmsghdr* c = CMSG_FIRSTHDR(&msg); c != nullptr; c = CMSG_NXTHDR(&msg, c)) {
    if (c->cmsg_level == SOL_SOCKET && c->cmsg_type == SCM_TIMESTAMPNS) {
      timespec ts{};
      std::memcpy(&ts, CMSG_DATA(c), sizeof ts);
      out.received_us = to_wall_us(ts);
    }
  }
  char text[INET_ADDRSTRLEN] = {};
  inet_ntop(AF_INET, &from.sin_addr, text, sizeof text);
  out.from_address = text;
  out.from_port = ntohs(from.sin_port);
  return out;
}

// Configuration ---------------------------------------------------------------

void LiveConfig::validate() const {
  std::vector<std::string> problems;
  try {
    scenario.validate();
  } catch (const ScenarioError& e) {
    for (const auto& p : e.problems()) problems.push_back("scenario: " + p);
  }
  if (sync_port == 0) problems.push_back("sync_port: must be non-zero");
  if (report_port == 0) problems.push_back("report_port: must be non-zero");
  if (periods == 0) problems.push_back("periods: must be at least 1");
  if (!(startup_delay_us >= 0.0) || !std::isfinite(startup_delay_us)) {
    problems.push_back("startup_delay_us: must be a non-negative number");
  }
  if (roster.empty()) problems.push_back("roster: must name at least one sensor");
  std::set<SensorId> seen;
  for (SensorId id : roster) {
    if (!seen.insert(id).second) {
      problems.push_back("roster: sensor " + std::to_string(id) + " listed twice");
    }
    if (scenario.geometry.index_of(id) == std::nullopt) {
      problems.push_back("roster: sensor " + std::to_string(id) + " not in the geometry");
    }
  }
  if (!problems.empty()) throw ScenarioError(std::move(problems));
}

LiveConfig parse_live_config(const std::string& text, const std::string& source,
                             const std::filesystem::path& base_dir) {
  const auto doc = detail::parse_json_or_throw(text, source);
  std::vector<std::string> problems;
  LiveConfig config;
  detail::ObjectReader root(doc, "", problems);
  if (root.valid()) {
    root.string("sync_address", config.sync_address);
    root.string("supervisor_address", config.supervisor_address);
    std::uint64_t value = 0;
    if (root.unsigned_int("sync_port", value, UINT16_MAX)) {
      config.sync_port = static_cast<std::uint16_t>(value);
    }
    if (root.unsigned_int("report_port", value, UINT16_MAX)) {
      config.report_port = static_cast<std::uint16_t>(value);
    }
    if (root.unsigned_int("periods", value, UINT32_MAX)) {
      config.periods = static_cast<std::uint32_t>(value);
    }
    root.number("startup_delay_us", config.startup_delay_us);
    std::vector<std::uint64_t> roster;
    const bool has_roster = root.unsigned_array("roster", roster, UINT16_MAX);

    if (const detail::json* sc = root.child("scenario")) {
      if (sc->is_string()) {
        const std::filesystem::path path = base_dir / sc->get<std::string>();
        try {
          config.scenario = load_scenario(path);
        } catch (const ScenarioError& e) {
          for (const auto& p : e.problems()) problems.push_back("scenario: " + p);
        }
      } else {
        config.scenario = detail::scenario_from_json(*sc, "scenario", problems);
      }
    } else {
      root.problem("scenario", "required field missing");
    }

    if (has_roster) {
      config.roster.assign(roster.begin(), roster.end());
    } else {
      config.roster = config.scenario.geometry.sensor_ids;
    }
    root.reject_unknown();
  }
  if (problems.empty()) {
    try {
      config.validate();
    } catch (const ScenarioError& e) {
      problems = e.problems();
    }
  }
  if (!problems.empty()) {
    for (auto& p : problems) p = source + ": " + p;
    throw ScenarioError(std::move(problems));
  }
  return config;
}

LiveConfig load_live_config(const std::filesystem::path& path) {
  return parse_live_config(detail::read_text_file(path), path.string(), path.parent_path());
}

// Supervisor --------------------------------------------------------------------

namespace {

// Remaining waits shorter than this are spun rather than slept, so frames
// leave within microseconds of their schedule point.
constexpr double kSpinMarginUs = 300.0;

}  // namespace

LiveSupervisor::LiveSupervisor(LiveConfig config)
    : config_(std::move(config)), sync_(UdpSocket::Options{.broadcast = true}) {
  config_.validate();
  reports_.bind(config_.supervisor_address, config_.report_port);
}

LiveSupervisorResult LiveSupervisor::run(
    const std::function<void(const PeriodResult&)>& on_period) {
  const Scenario& sc = config_.scenario;
  const double T = sc.sync_period_T_us;
  LiveSupervisorResult result;
  SupervisorState state = make_supervisor(
      std::set<SensorId>(config_.roster.begin(), config_.roster.end()), sc.sync_period_T_us);
  const double start = wall_now_us() + config_.startup_delay_us;
  PeriodIndex next_frame = 0;
  std::map<PeriodIndex, double> deadlines;

  auto release = [&](const PeriodComplete& period) {
    if (!period.roster_complete) {
      result.diagnostics.push_back("period " + std::to_string(period.period_index) +
                                   " released with " + std::to_string(period.reports.size()) +
                                   " of " + std::to_string(state.roster.size()) + " reports");
    }
    result.periods.push_back(
        process_period(period, T, sc.geometry, sc.coincidence_window_us));
    if (on_period) on_period(result.periods.back());
  };

  auto handle = [&](const UdpSocket::Datagram& datagram) {
    ++result.reports_received;
    SensorReport report;
    try {
      report = decode_report(datagram.payload);
    } catch (const WireError& e) {
      result.diagnostics.push_back("malformed report from " + datagram.from_address + ": " +
                                   e.what());
      return;
    }
    auto [outcome, next] = supervisor_on_report(std::move(state), std::move(report));
    state = std::move(next);
    if (outcome.diagnostic) result.diagnostics.push_back(*outcome.diagnostic);
    if (outcome.completed) release(*outcome.completed);
  };

  auto all_released = [&] {
    for (PeriodIndex p = 0; p < config_.periods; ++p) {
      if (!state.closed_periods.contains(p)) return false;
    }
    return true;
  };

  while (next_frame <= config_.periods || !all_released()) {
    double now = wall_now_us() - start;
    if (next_frame <= config_.periods && now >= T * next_frame) {
      auto [frame, next] = supervisor_tick(std::move(state), now);
      state = std::move(next);
      if (frame && frame->period_index <= config_.periods) {
        sync_.send_to(encode_sync(*frame), config_.sync_address, config_.sync_port);
        ++result.frames_sent;
        if (frame->period_index >= 1) {
          deadlines[frame->period_index - 1] =
              completion_deadline(state, frame->period_index - 1);
        }
      }
      next_frame = state.next_period_index;
      if (state.skipped_broadcasts > 0 && result.diagnostics.empty()) {
        result.diagnostics.push_back("sync schedule overrun; frames skipped");
      }
    }

    now = wall_now_us() - start;
    for (auto it = deadlines.begin(); it != deadlines.end();) {
      if (now < it->second) {
        ++it;
        continue;
      }
      auto [released, next] = supervisor_expire(std::move(state), it->first);
      state = std::move(next);
      if (released) release(*released);
      it = deadlines.erase(it);
    }

    double wake = std::numeric_limits<double>::infinity();
    if (next_frame <= config_.periods) wake = T * next_frame;
    if (!deadlines.empty()) {
      for (const auto& [p, at] : deadlines) wake = std::min(wake, at);
    }
    // Every frame sent and no deadline pending: nothing more can be released.
    if (std::isinf(wake)) break;
    const double wait_us = wake - (wall_now_us() - start) - kSpinMarginUs;
    const auto timeout = std::chrono::microseconds(
        wait_us > 0.0 ? static_cast<std::int64_t>(wait_us) : 0);
    if (auto datagram = reports_.receive(timeout)) handle(*datagram);
  }
  return result;
}

// Agent ---------------------------------------------------------------------------

LiveAgent::LiveAgent(LiveConfig config, SensorId sensor_id)
    : config_(std::move(config)),
      sensor_id_(sensor_id),
      sync_(UdpSocket::Options{.reuse_port = true, .kernel_timestamps = true}) {
  config_.validate();
  if (!config_.scenario.geometry.index_of(sensor_id_)) {
    throw PreconditionError("sensor " + std::to_string(sensor_id_) + " not in the geometry");
  }
  sync_.bind("0.0.0.0", config_.sync_port);
}

LiveAgentResult LiveAgent::run(std::chrono::microseconds idle_timeout) {
  const Scenario& sc = config_.scenario;
  const double T = sc.sync_period_T_us;
  const std::size_t index = *sc.geometry.index_of(sensor_id_);
  LiveAgentResult result;

  struct Arrival {
    double at_ref_us;
    double amplitude_g;
  };
  std::vector<Arrival> arrivals;
  for (const auto& rupture : sc.ruptures) {
    for (const auto& record : simulate_rupture(sc.geometry, rupture, sc.wave.wave_speed_m_s,
                                               sc.wave.threshold_g, sc.wave.attenuation,
                                               sc.wave.window_us)) {
      if (record.sensor_id == sensor_id_) {
        arrivals.push_back({record.arrival_ref_us, record.max_amplitude_g});
      }
    }
  }
  for (const auto& spurious : sc.spurious_events) {
    if (spurious.sensor_id == sensor_id_ &&
        detect(spurious.time_ref_us, spurious.amplitude_g, sc.wave.threshold_g,
               sc.wave.window_us)) {
      arrivals.push_back({spurious.time_ref_us, spurious.amplitude_g});
    }
  }
  std::stable_sort(arrivals.begin(), arrivals.end(),
                   [](const Arrival& a, const Arrival& b) { return a.at_ref_us < b.at_ref_us; });
  std::size_t next_arrival = 0;

  SensorSyncState sensor =
      make_sensor(sensor_id_, make_clock(sc.drift_ppm[index], 0.0, sc.max_abs_drift_ppm));
  // Nominal receipt offset of frame k on the reference timeline, as modeled
  // by the simulated LAN without jitter.
  const double receipt_offset_us = propagation_delay(sc.network, kSupervisorNode, sensor_id_) +
                                   sc.network.processing_latency_mean_us;
  std::optional<double> origin_us;

  while (true) {
    auto datagram = sync_.receive(idle_timeout);
    if (!datagram) {
      result.diagnostics.push_back("no sync frame within " +
                                   std::to_string(idle_timeout.count()) + " us; stopping");
      break;
    }
    SyncFrame frame;
    try {
      frame = decode_sync(datagram->payload);
    } catch (const WireError& e) {
      result.diagnostics.push_back(std::string("malformed sync frame: ") + e.what());
      continue;
    }
    ++result.frames_received;
    if (!origin_us) {
      origin_us = datagram->received_us - (T * frame.period_index + receipt_offset_us);
    }
    const double ref = std::max(datagram->received_us - *origin_us, sensor.clock.ref_now_us);

    // Arrivals at the receipt instant itself belong to the next period, as
    // in the simulated event order.
    while (next_arrival < arrivals.size() && arrivals[next_arrival].at_ref_us < ref) {
      const Arrival& a = arrivals[next_arrival++];
      sensor.clock = advance_to(sensor.clock, std::max(a.at_ref_us, sensor.clock.ref_now_us));
      const Ticks stamp =
          quantize_to_sampling(read_counter(sensor.clock), sc.wave.sampling_period_ticks);
      sensor = sensor_on_detection(std::move(sensor), stamp, a.amplitude_g);
      ++result.detections;
    }

    sensor.clock = advance_to(sensor.clock, ref);
    auto [outcome, next] = sensor_on_sync(std::move(sensor), frame);
    sensor = std::move(next);
    if (outcome.diagnostic) result.diagnostics.push_back(*outcome.diagnostic);
    if (outcome.report) {
      reports_.send_to(encode_report(*outcome.report), config_.supervisor_address,
                       config_.report_port);
      ++result.reports_sent;
    }
    if (frame.period_index >= config_.periods) break;
  }
  return result;
}

}  // namespace casc
