#include <benchmark/benchmark.h>

#include <vector>

#include "pcn/experiment.hpp"
#include "pcn/routing.hpp"

namespace {

pcn::SimNetwork backbone(int nodes) {
  pcn::ExperimentConfig cfg;
  cfg.nodes = nodes;
  cfg.imbalance = 0.4;
  return pcn::generate_network(cfg, 7);
}

void BM_CheapestPath(benchmark::State& state) {
  const auto sim = backbone(static_cast<int>(state.range(0)));
  const auto& net = sim.network;
  const pcn::NodeId dest{static_cast<std::uint32_t>(net.node_count() / 2)};
  std::uint32_t source = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcn::cheapest_path(pcn::prune(net, 20.0), pcn::NodeId{source}, dest));
    source = (source + 1) % static_cast<std::uint32_t>(dest.value);
  }
}
BENCHMARK(BM_CheapestPath)->Arg(100)->Arg(400);

void BM_MaxFlow(benchmark::State& state) {
  const auto sim = backbone(static_cast<int>(state.range(0)));
  const auto& net = sim.network;
  for (auto _ : state) benchmark::DoNotOptimize(pcn::max_flow(net, pcn::NodeId{0}, pcn::NodeId{1}));
}
BENCHMARK(BM_MaxFlow)->Arg(100)->Arg(400);

void BM_MultiSourceMaxFlow(benchmark::State& state) {
  const auto sim = backbone(100);
  const std::vector<pcn::NodeId> sources{pcn::NodeId{0}, pcn::NodeId{10}, pcn::NodeId{20}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcn::multi_source_max_flow(sim.network, sources, pcn::NodeId{50}));
  }
}
BENCHMARK(BM_MultiSourceMaxFlow);

void BM_WidestToDestination(benchmark::State& state) {
  const auto sim = backbone(100);
  const std::vector<pcn::NodeId> sources{pcn::NodeId{0}, pcn::NodeId{10}, pcn::NodeId{20}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pcn::widest_bottlenecks_to(pcn::prune(sim.network, 0.0), sources, pcn::NodeId{50}));
  }
}
BENCHMARK(BM_WidestToDestination);

}  // namespace
