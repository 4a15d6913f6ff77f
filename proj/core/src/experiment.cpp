#include "pcn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "pcn/errors.hpp"
#include "pcn/random.hpp"

namespace pcn {

namespace {

constexpr int kGenerationAttempts = 10'000;

// Uniform random simple d-regular graph by stub pairing; edges sorted (u < v).
std::vector<std::pair<std::uint32_t, std::uint32_t>> random_regular_edges(int nodes, int degree, Rng& rng) {
  const auto n = static_cast<std::uint32_t>(nodes);
  std::vector<std::uint32_t> stubs;
  stubs.reserve(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(degree));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> parent(n);

  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    stubs.clear();
    for (std::uint32_t v = 0; v < n; ++v) {
      for (int k = 0; k < degree; ++k) stubs.push_back(v);
    }
    for (std::size_t i = stubs.size(); i > 1; --i) {
      std::swap(stubs[i - 1], stubs[rng.below(i)]);
    }

    edges.clear();
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      auto u = stubs[i];
      auto v = stubs[i + 1];
      if (u == v) {
        simple = false;
        break;
      }
      if (u > v) std::swap(u, v);
      edges.emplace_back(u, v);
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;

    std::iota(parent.begin(), parent.end(), 0U);
    const auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::uint32_t components = n;
    for (const auto& [u, v] : edges) {
      const auto ru = find(u);
      const auto rv = find(v);
      if (ru != rv) {
        parent[ru] = rv;
        --components;
      }
    }
    if (components == 1) return edges;
  }
  throw GenerationExhausted("no simple connected " + std::to_string(degree) + "-regular graph on " +
                            std::to_string(nodes) + " nodes after " + std::to_string(kGenerationAttempts) +
                            " attempts");
}

// Splits capacity C into C(1+r)/2 and C(1-r)/2 with a random favored side.
std::pair<double, double> split_balances(const ExperimentConfig& cfg, Rng& rng) {
  const double capacity = rng.uniform(cfg.cap_min, cfg.cap_max);
  const double high = capacity * (1.0 + cfg.imbalance) / 2.0;
  const double low = capacity * (1.0 - cfg.imbalance) / 2.0;
  return rng.coin() ? std::pair{high, low} : std::pair{low, high};
}

// Distinct uniform sample of `count` values from [0, n), returned sorted.
std::vector<std::uint32_t> sample_distinct(std::uint32_t n, std::uint32_t count, Rng& rng) {
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0U);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

MetricSummary summarize(std::span<const std::vector<TrialMetrics>> strata, double TrialMetrics::*field) {
  double mean_sum = 0.0;
  double var_sum = 0.0;
  std::size_t used = 0;
  for (const auto& stratum : strata) {
    if (stratum.empty()) continue;
    double mean = 0.0;
    for (const auto& m : stratum) mean += m.*field;
    mean /= static_cast<double>(stratum.size());
    double var = 0.0;
    if (stratum.size() > 1) {
      for (const auto& m : stratum) var += (m.*field - mean) * (m.*field - mean);
      var /= static_cast<double>(stratum.size() - 1);
    }
    mean_sum += mean;
    var_sum += var;
    ++used;
  }
  if (used == 0) return {};
  return {mean_sum / static_cast<double>(used), std::sqrt(var_sum / static_cast<double>(used))};
}

TrialRecord make_record(const ExperimentConfig& cfg, std::uint64_t seed, const TrialMetrics& metrics) {
  return TrialRecord{cfg.strategy, cfg.connections, cfg.amount_min, cfg.amount_max, cfg.imbalance, seed, metrics};
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (nodes < 2) fail("nodes must be at least 2");
  if (degree < 1) fail("degree must be at least 1");
  if (degree >= nodes) fail("degree must be smaller than nodes");
  if ((static_cast<long long>(nodes) * degree) % 2 != 0) fail("nodes * degree must be even");
  if (!(cap_min > 0.0) || !(cap_min <= cap_max) || !std::isfinite(cap_max)) fail("require 0 < cap_min <= cap_max");
  if (!(amount_min > 0.0) || !(amount_min <= amount_max) || !std::isfinite(amount_max)) {
    fail("require 0 < amount_min <= amount_max");
  }
  if (payments < 0) fail("payments must be non-negative");
  // Destinations exclude the sender's gateways, so at least one node must remain.
  if (connections < 1 || connections >= nodes) fail("require 1 <= connections < nodes");
  if (!(imbalance >= 0.0 && imbalance <= 1.0)) fail("imbalance must lie in [0, 1]");
  if (!(fee_rate >= 0.0) || !std::isfinite(fee_rate)) fail("fee_rate must be non-negative");
  if (replications < 1) fail("replications must be at least 1");
}

GatewaySet SimNetwork::gateway_set(UserId user) const {
  const EndUser& u = users.at(user.value);
  return GatewaySet{u.gateways, u.node};
}

SimNetwork generate_network(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng topology(derive_seed(seed, "topology"));
  Rng balances(derive_seed(seed, "balances"));

  SimNetwork sim;
  for (int i = 0; i < cfg.nodes; ++i) sim.network.add_node(NodeRole::Router);
  for (const auto& [u, v] : random_regular_edges(cfg.nodes, cfg.degree, topology)) {
    const auto [bal_uv, bal_vu] = split_balances(cfg, balances);
    sim.network.add_channel(NodeId{u}, NodeId{v}, bal_uv, bal_vu);
  }

  const auto n = static_cast<std::uint32_t>(cfg.nodes);
  sim.users.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    EndUser user;
    user.id = UserId{i};
    for (const auto g : sample_distinct(n, static_cast<std::uint32_t>(cfg.connections), topology)) {
      user.gateways.push_back(NodeId{g});
      sim.network.set_role(NodeId{g}, NodeRole::Gateway);
    }
    sim.users.push_back(std::move(user));
  }

  if (cfg.track_user_channels) {
    for (auto& user : sim.users) {
      user.node = sim.network.add_node(NodeRole::EndUser);
      for (const auto g : user.gateways) {
        const auto [to_gateway, to_user] = split_balances(cfg, balances);
        sim.network.add_channel(*user.node, g, to_gateway, to_user);
      }
    }
  }
  return sim;
}

std::vector<PaymentRequest> generate_workload(const ExperimentConfig& cfg, const SimNetwork& sim,
                                              std::uint64_t seed) {
  cfg.validate();
  if (sim.users.empty()) throw InvalidConfig("network has no end-users");
  Rng rng(derive_seed(seed, "workload"));

  const auto n = static_cast<std::uint32_t>(cfg.nodes);
  std::vector<PaymentRequest> out;
  out.reserve(static_cast<std::size_t>(cfg.payments));
  for (int i = 0; i < cfg.payments; ++i) {
    PaymentRequest req;
    req.id = static_cast<std::uint64_t>(i);
    req.source_user = UserId{static_cast<std::uint32_t>(rng.below(sim.users.size()))};
    const auto& gateways = sim.users[req.source_user.value].gateways;
    // Index into the backbone nodes that are not this user's gateways.
    auto d = static_cast<std::uint32_t>(rng.below(n - gateways.size()));
    for (const auto g : gateways) {
      if (g.value <= d) ++d;
    }
    req.destination = NodeId{d};
    req.amount = rng.uniform(cfg.amount_min, cfg.amount_max);
    out.push_back(req);
  }
  return out;
}

TrialRun simulate(const ExperimentConfig& cfg, SimNetwork& sim, std::span<const PaymentRequest> workload) {
  EngineOptions options;
  options.fee_rate = cfg.fee_rate;
  options.strategy.ratio_argmin = cfg.ratio_argmin;

  TrialRun run;
  run.results.reserve(workload.size());
  std::size_t successes = 0;
  double relative_fee = 0.0;
  double hops = 0.0;
  for (const auto& req : workload) {
    const auto result = execute_payment(sim.network, req, sim.gateway_set(req.source_user), cfg.strategy, options);
    if (result.success) {
      ++successes;
      relative_fee += result.total_fee / req.amount;
      hops += result.hop_count;
    }
    run.results.push_back(result);
  }
  if (!workload.empty()) run.metrics.success_rate = static_cast<double>(successes) / workload.size();
  if (successes > 0) {
    run.metrics.avg_relative_fee = relative_fee / static_cast<double>(successes);
    run.metrics.avg_hop_count = hops / static_cast<double>(successes);
  }
  run.metrics.final_imbalance = network_imbalance(sim.network);
  return run;
}

TrialRun run_trial_detailed(const ExperimentConfig& cfg, std::uint64_t seed,
                            const std::vector<PaymentRequest>* imported) {
  SimNetwork sim = generate_network(cfg, seed);
  if (imported) {
    for (const auto& req : *imported) {
      if (req.source_user.value >= sim.users.size() || !sim.network.contains(req.destination) ||
          !sim.network.is_backbone(req.destination) || !(req.amount > 0.0)) {
        throw InvalidConfig("imported payment " + std::to_string(req.id) + " does not fit the network");
      }
      const auto& gws = sim.users[req.source_user.value].gateways;
      if (std::binary_search(gws.begin(), gws.end(), req.destination)) {
        throw InvalidConfig("imported payment " + std::to_string(req.id) + " targets its own gateway");
      }
    }
    return simulate(cfg, sim, *imported);
  }
  const auto workload = generate_workload(cfg, sim, seed);
  return simulate(cfg, sim, workload);
}

TrialMetrics run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_trial_detailed(cfg, seed).metrics;
}

double standard_error(const AggregateRow& row, const MetricSummary& metric) {
  if (row.trials == 0) return 0.0;
  return metric.stddev / std::sqrt(static_cast<double>(row.trials));
}

AggregateRow aggregate(const ExperimentConfig& key, std::span<const std::vector<TrialMetrics>> strata) {
  AggregateRow row{key.strategy, key.connections, key.amount_min, key.amount_max, key.imbalance, key.seed, 0,
                   {}, {}, {}, {}};
  for (const auto& s : strata) row.trials += s.size();
  row.success_rate = summarize(strata, &TrialMetrics::success_rate);
  row.avg_relative_fee = summarize(strata, &TrialMetrics::avg_relative_fee);
  row.avg_hop_count = summarize(strata, &TrialMetrics::avg_hop_count);
  row.final_imbalance = summarize(strata, &TrialMetrics::final_imbalance);
  return row;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto count = static_cast<std::size_t>(cfg.replications);
  std::vector<TrialMetrics> metrics(count);
  parallel_for(count, options.jobs, [&](std::size_t i) {
    metrics[i] = run_trial_detailed(cfg, cfg.seed + i, options.imported).metrics;
  });

  ExperimentReport report;
  for (std::size_t i = 0; i < count; ++i) report.trials.push_back(make_record(cfg, cfg.seed + i, metrics[i]));
  const std::vector<std::vector<TrialMetrics>> strata{metrics};
  report.aggregate = aggregate(cfg, strata);
  return report;
}

std::string_view to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::Connections: return "connections";
    case SweepParameter::Amount: return "amount";
    case SweepParameter::Imbalance: return "imbalance";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept {
  for (const auto p : {SweepParameter::Connections, SweepParameter::Amount, SweepParameter::Imbalance}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepParameter p, double value) {
  ExperimentConfig out = cfg;
  switch (p) {
    case SweepParameter::Connections:
      if (value != std::floor(value)) throw InvalidConfig("connections sweep value must be an integer");
      out.connections = static_cast<int>(value);
      break;
    case SweepParameter::Amount:
      out.amount_min = value - 5.0;
      out.amount_max = value + 5.0;
      break;
    case SweepParameter::Imbalance:
      out.imbalance = value;
      break;
  }
  out.validate();
  return out;
}

SweepReport run_sweep(const ExperimentConfig& cfg, SweepParameter p, std::span<const double> values,
                      std::span<const StrategyKind> strategies, const SweepOptions& options) {
  if (!options.average_imbalance.empty() && p == SweepParameter::Imbalance) {
    throw InvalidConfig("cannot average over imbalance while sweeping it");
  }
  struct Cell {
    ExperimentConfig key;
    std::vector<ExperimentConfig> strata;
  };
  std::vector<Cell> cells;
  for (const auto strategy : strategies) {
    for (const double value : values) {
      ExperimentConfig base = cfg;
      base.strategy = strategy;
      base = apply_sweep_value(base, p, value);
      Cell cell{base, {}};
      if (options.average_imbalance.empty()) {
        cell.strata.push_back(base);
      } else {
        double sum = 0.0;
        for (const double r : options.average_imbalance) {
          cell.strata.push_back(apply_sweep_value(base, SweepParameter::Imbalance, r));
          sum += r;
        }
        cell.key.imbalance = sum / static_cast<double>(options.average_imbalance.size());
      }
      cells.push_back(std::move(cell));
    }
  }

  struct Task {
    const ExperimentConfig* cfg;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& cell : cells) {
    for (const auto& stratum : cell.strata) {
      for (int r = 0; r < stratum.replications; ++r) tasks.push_back({&stratum, stratum.seed + r});
    }
  }
  std::vector<TrialMetrics> metrics(tasks.size());
  parallel_for(tasks.size(), options.jobs,
               [&](std::size_t i) { metrics[i] = run_trial(*tasks[i].cfg, tasks[i].seed); });

  SweepReport report;
  std::size_t next = 0;
  for (const auto& cell : cells) {
    std::vector<std::vector<TrialMetrics>> strata;
    for (const auto& stratum : cell.strata) {
      auto& bucket = strata.emplace_back();
      for (int r = 0; r < stratum.replications; ++r, ++next) {
        report.trials.push_back(make_record(stratum, tasks[next].seed, metrics[next]));
        bucket.push_back(metrics[next]);
      }
    }
    report.rows.push_back(aggregate(cell.key, strata));
  }
  return report;
}

}  // namespace pcn
