// Throughput of the non-vision path: window updates, crossings, matching and
// the logistic fit used for trend accuracy.

#include <benchmark/benchmark.h>

#include <random>

#include "ward/evaluation.hpp"
#include "ward/geometry.hpp"
#include "ward/logic.hpp"
#include "ward/logistic.hpp"

namespace {

ward::DetectionRecord record(ward::Timestamp ts, int persons) {
  ward::DetectionRecord r{"s", ts, {}, {}};
  for (int i = 0; i < persons; ++i) {
    r.boxes.push_back({ward::ObjectClass::person, 100.0 + 80 * i, 200, 60, 150, 0.9});
    r.roles.push_back(ward::RoleDistribution::from_primary(i ? ward::Role::staff : ward::Role::patient, 0.9));
  }
  return r;
}

void BM_WindowPushDerive(benchmark::State& state) {
  const ward::PipelineConfig cfg;
  ward::SmoothingWindow w(cfg.smoothing_window_s);
  ward::Timestamp ts = 0;
  for (auto _ : state) {
    w.push(record(++ts, static_cast<int>(ts % 3)), 0.3);
    benchmark::DoNotOptimize(ward::derive_state(w, cfg));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WindowPushDerive);

void BM_DetectCrossings(benchmark::State& state) {
  const ward::Polygon zone({{400, 200}, {700, 200}, {700, 500}, {400, 500}});
  const auto mask = ward::rasterize(ward::expand_polygon(zone, 0.10), 1088, 612);
  const auto a = record(1, 4);
  auto b = record(2, 4);
  for (auto& box : b.boxes) box.x += 7;
  for (auto _ : state) benchmark::DoNotOptimize(ward::detect_crossings(a, b, mask));
}
BENCHMARK(BM_DetectCrossings);

void BM_MatchBoxes(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ward::BoundingBox> p, g;
  for (int i = 0; i < state.range(0); ++i) {
    g.push_back({ward::ObjectClass::person, 1000 * u(rng), 500 * u(rng), 60, 120, 1});
    p.push_back({ward::ObjectClass::person, g.back().x + 5 * u(rng), g.back().y, 60, 120, u(rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(ward::match_boxes(p, g));
}
BENCHMARK(BM_MatchBoxes)->Arg(4)->Arg(32);

void BM_FitLogisticDay(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<bool> x, y;
  for (int i = 0; i < 86400; ++i) {
    const bool yi = rng() % 3 == 0;
    y.push_back(yi);
    x.push_back(rng() % 10 ? yi : !yi);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ward::fit_logistic(x, y));
}
BENCHMARK(BM_FitLogisticDay)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
