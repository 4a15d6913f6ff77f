#include <benchmark/benchmark.h>

#include "pcn/experiment.hpp"
#include "pcn/payment_engine.hpp"

namespace {

// Each iteration pays into a fresh copy of the starting network, so the copy
// is part of the measured time.
void BM_ExecutePayment(benchmark::State& state) {
  pcn::ExperimentConfig cfg;
  cfg.strategy = pcn::kAllStrategies[static_cast<std::size_t>(state.range(0))];
  auto sim = pcn::generate_network(cfg, 3);
  const auto workload = pcn::generate_workload(cfg, sim, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& req = workload[i++ % workload.size()];
    auto copy = sim.network;
    benchmark::DoNotOptimize(pcn::execute_payment(copy, req, sim.gateway_set(req.source_user), cfg.strategy));
  }
  state.SetLabel(std::string(pcn::to_string(cfg.strategy)));
}
BENCHMARK(BM_ExecutePayment)->DenseRange(0, 4);

void BM_SmallTrial(benchmark::State& state) {
  pcn::ExperimentConfig cfg;
  cfg.payments = 500;
  cfg.strategy = pcn::kAllStrategies[static_cast<std::size_t>(state.range(0))];
  cfg.imbalance = 0.4;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(pcn::run_trial(cfg, seed++));
  state.SetLabel(std::string(pcn::to_string(cfg.strategy)));
}
BENCHMARK(BM_SmallTrial)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace
