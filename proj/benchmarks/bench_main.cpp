#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>
#include <vector>

#include "mdi/markov_analysis.hpp"
#include "mdi/pipeline.hpp"

using namespace mdi;

namespace {

NamedTrace trace(double seconds, std::uint64_t seed) {
  SyntheticTraceSpec s;
  s.duration_s = seconds;
  s.seed = seed;
  return {"bench_" + std::to_string(seed), gen_rapidly_changing(s)};
}

const TransitionModel& trained(const std::string& controller) {
  static std::map<std::string, TransitionModel> cache;
  auto it = cache.find(controller);
  if (it == cache.end()) {
    std::vector<NamedTrace> ts;
    for (std::uint64_t i = 0; i < 10; ++i) ts.push_back(trace(60, 100 + i));
    ControllerSpec spec;
    spec.name = controller;
    it = cache.emplace(controller, train_model(ts, spec, NetworkParams{}, 1, 7).model).first;
  }
  return it->second;
}

void BM_Quantize(benchmark::State& state) {
  const auto cfg = QuantizerConfig::uniform(-0.5, 0.5, 11, -0.5, 0.5, 21);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  std::vector<CompositeObservation> obs;
  for (int i = 0; i < 4096; ++i) obs.emplace_back(u(rng), u(rng));
  for (auto _ : state) {
    std::size_t acc = 0;
    for (const auto& o : obs) acc += cfg.flat(quantize(o, cfg));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(obs.size()));
}
BENCHMARK(BM_Quantize);

void BM_Simulation(benchmark::State& state) {
  const auto t = trace(60, 3);
  ControllerSpec spec;
  spec.name = state.range(0) == 0 ? "verus-like" : "copa-like";
  for (auto _ : state) benchmark::DoNotOptimize(run_controller(t, spec, NetworkParams{}, 5));
}
BENCHMARK(BM_Simulation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MdiSimulation(benchmark::State& state) {
  const auto t = trace(60, 4);
  ControllerSpec spec;
  spec.name = "mdi";
  spec.model = std::make_shared<const TransitionModel>(trained("copa-like"));
  for (auto _ : state) benchmark::DoNotOptimize(run_controller(t, spec, NetworkParams{}, 5));
}
BENCHMARK(BM_MdiSimulation)->Unit(benchmark::kMillisecond);

void BM_Normalize(benchmark::State& state) {
  TransitionModel base(trained("copa-like").config());
  base.merge(trained("copa-like"));
  for (auto _ : state) {
    TransitionModel m = base;
    m.normalize();
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_Normalize)->Unit(benchmark::kMicrosecond);

void BM_Stationary(benchmark::State& state) {
  const auto& m = trained("copa-like");
  const auto p = to_stochastic(m);
  StationaryOptions opt;
  opt.start = occupancy(m);
  for (auto _ : state) benchmark::DoNotOptimize(stationary(p, opt));
}
BENCHMARK(BM_Stationary)->Unit(benchmark::kMillisecond);

void BM_MixingTimes(benchmark::State& state) {
  const auto p = to_stochastic(trained("copa-like"));
  const std::vector<double> eps = {1e-3, 1e-5, 1e-7};
  for (auto _ : state) benchmark::DoNotOptimize(mixing_times(p, eps));
}
BENCHMARK(BM_MixingTimes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
