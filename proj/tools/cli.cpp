#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "casc/clock.hpp"
#include "casc/csv.hpp"
#include "casc/live.hpp"
#include "casc/localization.hpp"
#include "casc/montecarlo.hpp"
#include "casc/retiming.hpp"
#include "casc/scenario.hpp"
#include "casc/simulation.hpp"

namespace casc {

namespace {

void print_errors(const std::exception& e, std::ostream& err) {
  if (const auto* scenario = dynamic_cast<const ScenarioError*>(&e)) {
    for (const auto& p : scenario->problems()) err << "error: " << p << "\n";
    return;
  }
  err << "error: " << e.what() << "\n";
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, std::ostream& out) {
  Scenario scenario = load_scenario(scenario_path);
  if (seed) {
    scenario.seed = *seed;
    scenario.network.seed = *seed;
  }
  const RunReport report = run(scenario);
  export_csv(report, out_dir);
  for (const auto& [name, value] : report.summary.rows()) out << name << " = " << value << "\n";
  return kExitOk;
}

int cmd_localize(const std::string& retimed_path, const std::string& geometry_path,
                 double window_us, std::ostream& out) {
  const CableGeometry geom = load_geometry(geometry_path);
  geom.validate();
  const auto events = read_retimed_csv(retimed_path);

  std::map<PeriodIndex, std::vector<RetimedEvent>> by_period;
  for (const auto& e : events) by_period[e.period_index].push_back(e);

  out << "period_index,cluster_id,cluster_size,s1,s2,s3,x_est_m,v_est_m_s,flags\n";
  for (auto& [period, list] : by_period) {
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.retimed_us < b.retimed_us;
    });
    const auto clusters = cluster_events(list, window_us);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const RuptureEstimate est = localize(clusters[c], geom);
      out << period << "," << c << "," << clusters[c].size() << ",";
      if (est.triple) {
        out << est.triple->s1 << "," << est.triple->s2 << "," << est.triple->s3 << ",";
      } else {
        out << ",,,";
      }
      out << (est.x_est_m ? format_double(*est.x_est_m) : "") << ","
          << (est.v_est_m_s ? format_double(*est.v_est_m_s) : "") << ","
          << est.flags.to_string() << "\n";
    }
  }
  return kExitOk;
}

// Two sensors per drift value see the same physical event half way through
// each period; sync receipt is simultaneous.
int cmd_sync_demo(std::uint32_t periods, double period_us, const std::vector<double>& drifts,
                  std::ostream& out) {
  out << "period,drift_ppm,saved_counter_ticks,event_local_ticks,unretimed_error_us,"
         "retimed_us,retimed_error_us\n";
  std::vector<ClockState> clocks;
  for (double d : drifts) clocks.push_back(make_clock(d, 0.0, std::max(1000.0, std::abs(d))));
  for (std::uint32_t k = 0; k < periods; ++k) {
    const double start = period_us * k;
    const double event = start + period_us / 2.0;
    const double truth = event - start;
    for (auto& clock : clocks) {
      clock = advance_to(clock, event);
      const double local = read_counter(clock);
      clock = advance_to(clock, start + period_us);
      auto [saved, reset] = save_and_reset(clock);
      clock = reset;
      const double retimed = retime(local, saved, period_us);
      out << k << "," << format_double(clock.drift_ppm) << "," << format_double(saved) << ","
          << format_double(local) << "," << format_double(local - truth) << ","
          << format_double(retimed) << "," << format_double(retimed - truth) << "\n";
    }
  }
  return kExitOk;
}

void print_estimates(const PeriodResult& period, std::ostream& out) {
  for (std::size_t c = 0; c < period.estimates.size(); ++c) {
    const auto& est = period.estimates[c];
    out << "period " << period.period_index << " cluster " << c << ": ";
    if (est.x_est_m) {
      out << "x_est_m=" << format_double(*est.x_est_m)
          << " v_est_m_s=" << format_double(*est.v_est_m_s);
    } else {
      out << "no estimate";
    }
    if (!est.flags.empty()) out << " flags=" << est.flags.to_string();
    out << "\n";
  }
  out.flush();
}

int cmd_supervise(const std::string& config_path, std::ostream& out, std::ostream& err) {
  LiveSupervisor supervisor(load_live_config(config_path));
  const auto result =
      supervisor.run([&](const PeriodResult& period) { print_estimates(period, out); });
  for (const auto& d : result.diagnostics) err << "note: " << d << "\n";
  out << "frames_sent = " << result.frames_sent << "\n"
      << "reports_received = " << result.reports_received << "\n"
      << "periods_released = " << result.periods.size() << "\n";
  return kExitOk;
}

int cmd_agent(const std::string& config_path, std::uint16_t sensor_id, double idle_timeout_s,
              std::ostream& out, std::ostream& err) {
  LiveAgent agent(load_live_config(config_path), sensor_id);
  const auto result = agent.run(std::chrono::microseconds(
      static_cast<std::int64_t>(idle_timeout_s * 1e6)));
  for (const auto& d : result.diagnostics) err << "note: " << d << "\n";
  out << "sensor " << sensor_id << ": frames_received = " << result.frames_received
      << ", reports_sent = " << result.reports_sent << ", detections = " << result.detections
      << "\n";
  return result.frames_received > 0 ? kExitOk : kExitFailure;
}

int cmd_montecarlo(const std::string& scenario_path, const MonteCarloConfig& config,
                   std::ostream& out) {
  const Scenario base = load_scenario(scenario_path);
  const auto result = run_monte_carlo(base, config);
  out << "trials = " << config.trials << "\n"
      << "jitter_us = " << format_double(config.jitter_us) << "\n"
      << "failures = " << result.failures << "\n"
      << "p50_error_m = " << format_double(result.p50_m) << "\n"
      << "p99_error_m = " << format_double(result.p99_m) << "\n"
      << "max_error_m = " << format_double(result.max_m) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cable rupture localization over a synchronized wireless sensor network", "casc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write CSV tables");
  simulate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the scenario seed");

  std::string retimed_path;
  std::string geometry_path;
  double window_us = kDefaultCoincidenceWindowUs;
  auto* localize_cmd = app.add_subcommand("localize", "Localize ruptures from retimed.csv");
  localize_cmd->add_option("retimed", retimed_path, "retimed.csv from a simulate run")->required();
  localize_cmd->add_option("--geometry", geometry_path, "Scenario or geometry JSON")->required();
  localize_cmd->add_option("--window-us", window_us, "Coincidence window")
      ->check(CLI::PositiveNumber);

  std::uint32_t demo_periods = 3;
  double demo_period_us = kDefaultSyncPeriodUs;
  std::vector<double> demo_drifts{50.0, -50.0, 37.0, -12.0};
  auto* demo = app.add_subcommand("sync-demo", "Show drift cancellation by retiming");
  demo->add_option("--periods", demo_periods, "Number of sync periods")
      ->check(CLI::Range(1u, 1000000u));
  demo->add_option("--period-us", demo_period_us, "Sync period T")->check(CLI::PositiveNumber);
  demo->add_option("--drift-ppm", demo_drifts, "Clock drifts")->expected(1, -1);

  std::string config_path;
  auto* supervise = app.add_subcommand("supervise", "Run the live supervisor");
  supervise->add_option("config", config_path, "Live configuration JSON")->required();

  std::uint16_t sensor_id = 0;
  double idle_timeout_s = 5.0;
  auto* agent = app.add_subcommand("agent", "Run one live sensor agent");
  agent->add_option("config", config_path, "Live configuration JSON")->required();
  agent->add_option("--sensor-id", sensor_id, "Sensor identifier")->required();
  agent->add_option("--idle-timeout-s", idle_timeout_s, "Give up after this long without a frame")
      ->check(CLI::PositiveNumber);

  MonteCarloConfig mc;
  auto* montecarlo = app.add_subcommand("montecarlo", "Randomized localization accuracy study");
  montecarlo->add_option("scenario", scenario_path, "Base scenario JSON file")->required();
  montecarlo->add_option("--trials", mc.trials, "Number of trials")
      ->check(CLI::Range(1u, 100000000u));
  montecarlo->add_option("--jitter-us", mc.jitter_us, "Sync receipt jitter, +-us")
      ->check(CLI::NonNegativeNumber);
  montecarlo->add_option("--max-drift-ppm", mc.max_drift_ppm, "Drift range, +-ppm")
      ->check(CLI::NonNegativeNumber);
  montecarlo->add_option("--seed", mc.seed, "Trial seed");

  std::vector<std::string> argv_storage{"casc"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(scenario_path, out_dir, seed, out);
    if (*localize_cmd) return cmd_localize(retimed_path, geometry_path, window_us, out);
    if (*demo) return cmd_sync_demo(demo_periods, demo_period_us, demo_drifts, out);
    if (*supervise) return cmd_supervise(config_path, out, err);
    if (*agent) return cmd_agent(config_path, sensor_id, idle_timeout_s, out, err);
    if (*montecarlo) return cmd_montecarlo(scenario_path, mc, out);
  } catch (const std::exception& e) {
    print_errors(e, err);
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace casc
