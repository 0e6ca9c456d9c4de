#include <odorsim/plume.hpp>
#include <odorsim/scenario.hpp>
#include <odorsim/sim.hpp>
#include <odorsim/smc.hpp>

#include <benchmark/benchmark.h>

using namespace odorsim;

namespace {

Mat example_coupling() {
  Mat h(4, 4);
  h << 2, 0, -1, 0, 0, 1, 0, 0, 0, -1, 1, 0, 0, 0, -1, 1;
  return h;
}

void BM_SampledControl(benchmark::State& state) {
  const smc::SlidingModeController c(example_coupling(), 1, smc::SmcParams{});
  const smc::ControlInput in{Vec::LinSpaced(4, -2.0, 2.0), Vec::Constant(4, 0.3), Vec::Zero(4),
                             Vec::Constant(4, 0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(c.sampled(in, 1e-3));
}
BENCHMARK(BM_SampledControl);

void BM_ContinuousControl(benchmark::State& state) {
  const smc::SlidingModeController c(example_coupling(), 1, smc::SmcParams{});
  const smc::ControlInput in{Vec::LinSpaced(4, -2.0, 2.0), Vec::Constant(4, 0.3), Vec::Zero(4),
                             Vec::Constant(4, 0.5)};
  for (auto _ : state) benchmark::DoNotOptimize(c.continuous(in));
}
BENCHMARK(BM_ContinuousControl);

void BM_Concentration(benchmark::State& state) {
  plume::PlumeState p;
  p.source_position = Vec::Zero(2);
  for (int k = 0; k < state.range(0); ++k) p = plume::release_filament(std::move(p), 0.0);
  const Vec x = Vec::Constant(2, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(plume::concentration_at(p, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Concentration)->Arg(100)->Arg(1000);

void BM_ConsensusRun(benchmark::State& state) {
  const auto cfg =
      scenario::load_scenario(*scenario::canned_scenario("paper_consensus")).config;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(cfg));
  state.SetLabel("10 s at dt = 1e-3");
}
BENCHMARK(BM_ConsensusRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
