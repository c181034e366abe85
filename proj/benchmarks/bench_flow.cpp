// Per-second vision cost: preprocessing, polynomial expansion and dense flow
// at the flow resolution. The 1 fps contract needs the sum well under 1 s.

#include <benchmark/benchmark.h>

#include "ward/flow.hpp"
#include "ward/preprocess.hpp"
#include "ward/simulator.hpp"

namespace {

ward::ScenarioSpec moving_scene() {
  ward::ScenarioSpec s;
  s.seed = 3;
  s.session_id = "bench";
  s.duration_s = 2;
  s.render_dims = {1088, 612};
  s.schedule = {{0, 2, {{"p", ward::Role::patient, {ward::ObjectClass::person, 300, 200, 100, 250, 1}, {}}}, 3.0}};
  return s;
}

void BM_Preprocess(benchmark::State& state) {
  const auto spec = moving_scene();
  const ward::FrameSynth synth(spec);
  const ward::Frame f = synth.render(0);
  const ward::PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ward::preprocess(f, cfg));
}
BENCHMARK(BM_Preprocess)->Unit(benchmark::kMillisecond);

void BM_PolynomialExpansion(benchmark::State& state) {
  const auto spec = moving_scene();
  const ward::FrameSynth synth(spec);
  const auto g = ward::to_grayscale_downsampled(synth.render(0));
  for (auto _ : state) benchmark::DoNotOptimize(ward::polynomial_expansion(g, 5, 1.2));
}
BENCHMARK(BM_PolynomialExpansion)->Unit(benchmark::kMillisecond);

void BM_FarnebackFlow(benchmark::State& state) {
  const auto spec = moving_scene();
  const ward::FrameSynth synth(spec);
  const auto a = ward::to_grayscale_downsampled(synth.render(0));
  const auto b = ward::to_grayscale_downsampled(synth.render(1));
  ward::FlowParams p;
  p.levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ward::farneback_flow(a, b, p));
}
BENCHMARK(BM_FarnebackFlow)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
