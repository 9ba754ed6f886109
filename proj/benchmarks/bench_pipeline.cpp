// Hot-path microbenchmarks: per-step detector scoring (the streaming latency
// budget), single-pair TDMI (the Phase I unit of work), plant simulation
// throughput, and one root-cause effect replay.
#include <cstddef>
#include <vector>

#include <benchmark/benchmark.h>

#include "causaltwin/detect.hpp"
#include "causaltwin/discovery.hpp"
#include "causaltwin/rootcause.hpp"
#include "causaltwin/scm.hpp"
#include "causaltwin/synth.hpp"
#include "causaltwin/tdmi.hpp"

namespace {

using namespace causaltwin;

// One fitted swat51 world shared by every benchmark in this binary.
struct World {
  PlantGenerator gen{"swat51", 1};
  TimeSeriesFrame train;
  Scm scm;
  std::vector<double> weights;

  World() : train(gen.clean(12000, 0)) {
    AugmentedFrame aug = augment(train, 5);
    scm = fit(aug, gen.bundle().truth_graph);
    weights = mcai_weights(gen.bundle().truth_graph);
  }
};

World& world() {
  static World w;
  return w;
}

void BM_DetectorStep(benchmark::State& state) {
  World& w = world();
  Detector detector(&w.scm, w.weights, 1e18);
  std::vector<double> row(w.train.cols());
  std::size_t t = 0;
  for (auto _ : state) {
    for (std::size_t i = 0; i < w.train.cols(); ++i) row[i] = w.train.at(t, i);
    benchmark::DoNotOptimize(detector.step(row.data()));
    t = (t + 1) % w.train.rows();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_DetectorStep);

void BM_TdmiPair(benchmark::State& state) {
  World& w = world();
  const std::vector<double> x = w.train.column(1);  // level
  const std::vector<double> y = w.train.column(4);  // outflow
  for (auto _ : state) {
    benchmark::DoNotOptimize(tdmi(x, y, 1, 16));
  }
}
BENCHMARK(BM_TdmiPair);

void BM_PlantSimulate(benchmark::State& state) {
  World& w = world();
  const std::size_t horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.gen.clean(horizon, 3));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(horizon));
}
BENCHMARK(BM_PlantSimulate)->Arg(1000);

void BM_CausalEffectReplay(benchmark::State& state) {
  World& w = world();
  AlarmEvent event;
  event.begin = 2000;
  event.end = 2199;
  event.peak_step = 2100;
  RootCauseOptions opts;
  opts.samples = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(causal_effect(w.scm, w.weights, w.train, event, 3, opts));
  }
}
BENCHMARK(BM_CausalEffectReplay);

}  // namespace

BENCHMARK_MAIN();
