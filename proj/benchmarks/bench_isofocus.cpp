#include <benchmark/benchmark.h>

#include "isofocus/flow_field.hpp"
#include "isofocus/fv.hpp"
#include "isofocus/weak_verifier.hpp"

using namespace isofocus;

namespace {

const SimilaritySolution& reference() {
  static const auto sol = SimilaritySolution::build(SimilarityParams::make(2, -1.0));
  return sol;
}

void BM_Build(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto p = SimilarityParams::make(m, -0.5 * m);
  for (auto _ : state) benchmark::DoNotOptimize(SimilaritySolution::build(p));
}
BENCHMARK(BM_Build)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  const auto& sol = reference();
  double r = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sol.evaluate(-0.7, r));
    r = r < 5.0 ? r * 1.01 : 0.01;
  }
}
BENCHMARK(BM_Evaluate);

void BM_WeakResidual(benchmark::State& state) {
  const auto& sol = reference();
  const auto battery = default_battery(sol);
  const auto& psi = battery.front();
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(weak_residual(sol, psi, WeakForm::Mass, level));
}
BENCHMARK(BM_WeakResidual)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

void BM_FVAdvance(benchmark::State& state) {
  const auto& sol = reference();
  auto cfg = FVConfig::defaults(sol, static_cast<int>(state.range(0)));
  cfg.t_end = -0.5;
  const auto init = init_from_similarity(sol, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(advance(init, cfg, sol));
}
BENCHMARK(BM_FVAdvance)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
