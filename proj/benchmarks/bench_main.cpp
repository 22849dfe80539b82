#include <random>

#include <benchmark/benchmark.h>

#include "stimnet/features/extractor.hpp"
#include "stimnet/features/labeling.hpp"
#include "stimnet/learn/decision_tree.hpp"
#include "stimnet/learn/selection.hpp"
#include "stimnet/netsim/simulator.hpp"

using namespace stimnet;

namespace {

learn::Dataset noisy_dataset(std::size_t rows, std::size_t features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  learn::Dataset d(features, 3);
  std::vector<double> x(features);
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(r % 3);
    for (auto& v : x) v = noise(rng);
    x[0] += label;
    x[1] -= 0.5 * label;
    d.add(x, label);
  }
  return d;
}

struct Desk {
  netsim::Topology topology = netsim::build_topology({}, 1);
  std::vector<netsim::Connection> connections;
  netsim::MisbehaviorPlan plan;

  explicit Desk(double duration) {
    connections = netsim::plan_connections(topology, {}, duration, 7);
    netsim::MisbehaviorSpec spec;
    spec.kind = netsim::MisbehaviorKind::dropping;
    plan = netsim::plan_misbehavior(topology, spec, 11);
  }
};

}  // namespace

static void BM_TrainTree(benchmark::State& state) {
  const auto d = noisy_dataset(static_cast<std::size_t>(state.range(0)), 24, 3);
  for (auto _ : state) benchmark::DoNotOptimize(learn::train_tree(d));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainTree)->Arg(500)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

static void BM_ForwardSelection(benchmark::State& state) {
  const auto d = noisy_dataset(static_cast<std::size_t>(state.range(0)), 8, 5);
  for (auto _ : state) benchmark::DoNotOptimize(learn::forward_selection(d, 10, 1));
}
BENCHMARK(BM_ForwardSelection)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  const double duration = static_cast<double>(state.range(0));
  const Desk desk(duration);
  std::size_t events = 0;
  for (auto _ : state) {
    auto r = netsim::run_simulation(desk.topology, desk.connections, desk.plan, duration, 1);
    events = r.trace.events.size();
    benchmark::DoNotOptimize(r);
  }
  state.counters["events"] = static_cast<double>(events);
}
BENCHMARK(BM_Simulate)->Arg(300)->Arg(1200)->Unit(benchmark::kMillisecond);

static void BM_ExtractMonitor(benchmark::State& state) {
  const Desk desk(1200);
  const auto run = netsim::run_simulation(desk.topology, desk.connections, desk.plan, 1200, 1);
  const features::FeatureExtractor fx(run.trace, run.connections, {static_cast<double>(state.range(0)), 0.0, 1200});
  const auto counts = fx.forwarded_counts();
  const auto busiest = static_cast<NodeId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  for (auto _ : state) benchmark::DoNotOptimize(features::paired_samples(fx, desk.plan, busiest));
}
BENCHMARK(BM_ExtractMonitor)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
