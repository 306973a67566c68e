#include <benchmark/benchmark.h>

#include "auvgnc/bernstein_path.hpp"
#include "auvgnc/l1_adaptive.hpp"
#include "auvgnc/scenario.hpp"
#include "auvgnc/simulation.hpp"

using namespace auvgnc;

static void BM_Expm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = Matrix::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(expm(a));
}
BENCHMARK(BM_Expm)->Arg(2)->Arg(6)->Arg(12);

static void BM_BuildGains(benchmark::State& state) {
  const auto d = DesiredSystem::make(default_l1_config().M.build());
  for (auto _ : state) benchmark::DoNotOptimize(build_gains(d, Matrix::Identity(2, 2), 0.05));
}
BENCHMARK(BM_BuildGains);

static void BM_PropagateFrame(benchmark::State& state) {
  const auto path = preset_path("canyon");
  const auto f0 = initial_frame(path);
  const double step = path.final_time() / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_frame(path, f0, step));
}
BENCHMARK(BM_PropagateFrame);

static void BM_L1Step(benchmark::State& state) {
  const auto cfg = default_l1_config();
  L1Controller ctl(DesiredSystem::make(cfg.M.build()), cfg.C.build(), cfg.Q, 0.05);
  const Vector y = Vector::Constant(2, 0.01), wc = Vector::Constant(2, 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(ctl.step(y, wc));
}
BENCHMARK(BM_L1Step);

static void BM_L1Norm(benchmark::State& state) {
  const auto c = default_l1_config().C.build();
  for (auto _ : state) benchmark::DoNotOptimize(l1_norm(c));
}
BENCHMARK(BM_L1Norm)->Unit(benchmark::kMillisecond);

static void BM_RunDepthChange(benchmark::State& state) {
  auto cfg = preset("depth_change");
  cfg.duration = 60.0;
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_RunDepthChange)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
