#include <benchmark/benchmark.h>

#include "casc/localization.hpp"
#include "casc/retiming.hpp"
#include "casc/simulation.hpp"
#include "casc/wire.hpp"

namespace {

void BM_Retime(benchmark::State& state) {
  double ev = 250'000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(casc::retime(ev, 999'950.0, 1e6));
    ev += 1.0;
    if (ev > 999'000.0) ev = 0.0;
  }
}
BENCHMARK(BM_Retime);

void BM_Localize(benchmark::State& state) {
  const auto geom = casc::CableGeometry::uniform(static_cast<std::size_t>(state.range(0)));
  std::vector<casc::RetimedEvent> cluster;
  for (std::size_t i = 0; i < geom.size(); ++i) {
    casc::RetimedEvent e;
    e.sensor_id = geom.sensor_ids[i];
    e.retimed_us = std::abs(geom.sensor_positions_m[i] - 14.0) / 5000.0 * 1e6;
    cluster.push_back(e);
  }
  for (auto _ : state) benchmark::DoNotOptimize(casc::localize(cluster, geom));
}
BENCHMARK(BM_Localize)->Arg(4)->Arg(64);

void BM_ReportCodec(benchmark::State& state) {
  casc::SensorReport report{1, 2, 1'000'050, {}};
  for (int i = 0; i < state.range(0); ++i) {
    report.events.push_back({static_cast<casc::Ticks>(i * 1000), 1000});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(casc::decode_report(casc::encode_report(report)));
  }
  state.SetBytesProcessed(state.iterations() *
                          static_cast<std::int64_t>(casc::encode_report(report).size()));
}
BENCHMARK(BM_ReportCodec)->Arg(1)->Arg(1000);

void BM_CanonicalRun(benchmark::State& state) {
  const auto scenario = casc::Scenario::canonical();
  for (auto _ : state) benchmark::DoNotOptimize(casc::run(scenario));
}
BENCHMARK(BM_CanonicalRun);

}  // namespace
BENCHMARK_MAIN();
