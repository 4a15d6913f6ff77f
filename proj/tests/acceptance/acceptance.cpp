// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "pcn/experiment.hpp"
#include "pcn/payment_engine.hpp"
#include "pcn/random.hpp"
#include "pcn/routing.hpp"
#include "pcn/strategies.hpp"

namespace fs = std::filesystem;
using namespace pcn;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, std::string note) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!! ") + std::move(note));
  }
};

int g_failures = 0;

void report(int number, const std::string& title, const Outcome& o, double secs) {
  std::cout << "criterion " << number << " " << (o.pass ? "PASS" : "FAIL") << "  " << title
            << fmt("  (%.1f s)", secs) << "\n";
  for (const auto& n : o.notes) std::cout << "    " << n << "\n";
  std::cout.flush();
  if (!o.pass) ++g_failures;
}

const std::vector<double> kImbalanceStrata{0.0, 0.2, 0.4, 0.6, 0.8};

// Experiment cells (strategy, connections, amount center), averaged over the
// imbalance strata with the default replications.
class CellCache {
 public:
  explicit CellCache(int jobs) : jobs_(jobs) {}

  const AggregateRow& get(StrategyKind s, int connections, double center) {
    const auto key = std::make_tuple(s, connections, center);
    auto it = cells_.find(key);
    if (it != cells_.end()) return it->second;

    ExperimentConfig cfg;
    cfg.connections = connections;
    cfg.strategy = s;
    const std::array values{center};
    const std::array strategies{s};
    SweepOptions options;
    options.jobs = jobs_;
    options.average_imbalance = kImbalanceStrata;
    const auto start = Clock::now();
    auto report = run_sweep(cfg, SweepParameter::Amount, values, strategies, options);
    const double secs = seconds_since(start);
    std::cout << fmt("    [cell %-18s c=%d amount=%2.0f: %zu trials in %.1f s]\n", std::string(to_string(s)).c_str(),
                     connections, center, report.trials.size(), secs);
    std::cout.flush();
    rows_.push_back(report.rows.front());
    return cells_.emplace(key, report.rows.front()).first->second;
  }

  double success(StrategyKind s, int c, double center) { return get(s, c, center).success_rate.mean; }

  const std::vector<AggregateRow>& rows() const { return rows_; }

 private:
  int jobs_;
  std::map<std::tuple<StrategyKind, int, double>, AggregateRow> cells_;
  std::vector<AggregateRow> rows_;
};

double se(const AggregateRow& row, const MetricSummary& m) { return standard_error(row, m); }

double pooled(double a, double b) { return std::sqrt(a * a + b * b); }

const char* name(StrategyKind s) {
  static std::map<StrategyKind, std::string> names;
  auto& n = names[s];
  if (n.empty()) n = std::string(to_string(s));
  return n.c_str();
}

// ---------------------------------------------------------------------------

Outcome strategy_ordering(CellCache& cells) {
  Outcome o;
  const auto& in = cells.get(StrategyKind::InOutRatio, 3, 30);
  const auto& mf = cells.get(StrategyKind::MaxFlow, 3, 30);
  const auto& gr = cells.get(StrategyKind::Greedy, 3, 30);
  for (const auto* row : {&in, &mf, &gr}) {
    o.notes.push_back(fmt("%-12s success %.4f  se %.4f", name(row->strategy), row->success_rate.mean,
                          se(*row, row->success_rate)));
  }
  const double gap1 = in.success_rate.mean - mf.success_rate.mean;
  const double se1 = pooled(se(in, in.success_rate), se(mf, mf.success_rate));
  const double gap2 = mf.success_rate.mean - gr.success_rate.mean;
  const double se2 = pooled(se(mf, mf.success_rate), se(gr, gr.success_rate));
  o.check(gap1 > 2 * se1, fmt("inout_ratio - maxflow = %.4f vs 2se %.4f", gap1, 2 * se1));
  o.check(gap2 > 2 * se2, fmt("maxflow - greedy = %.4f vs 2se %.4f", gap2, 2 * se2));
  return o;
}

Outcome five_connections(CellCache& cells) {
  Outcome o;
  const double s = cells.success(StrategyKind::InOutRatio, 5, 30);
  o.check(s >= 0.90, fmt("inout_ratio success at 5 connections = %.4f", s));
  return o;
}

Outcome amount_degradation(CellCache& cells) {
  Outcome o;
  const std::vector<double> centers{20, 30, 40, 50, 60, 70, 80};
  for (const auto s : kAllStrategies) {
    std::string line = fmt("%-18s", name(s));
    int inversions = 0;
    bool within = true;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const auto& row = cells.get(s, 3, centers[i]);
      line += fmt(" %.4f", row.success_rate.mean);
      if (i == 0) continue;
      const auto& prev = cells.get(s, 3, centers[i - 1]);
      const double rise = row.success_rate.mean - prev.success_rate.mean;
      if (rise > 0) {
        ++inversions;
        within = within && rise <= pooled(se(row, row.success_rate), se(prev, prev.success_rate));
      }
    }
    o.check(inversions == 0 || (inversions == 1 && within), line + fmt("  inversions %d", inversions));
  }
  const double gap20 = cells.success(StrategyKind::InOutRatio, 3, 20) - cells.success(StrategyKind::Greedy, 3, 20);
  const double gap80 = cells.success(StrategyKind::InOutRatio, 3, 80) - cells.success(StrategyKind::Greedy, 3, 80);
  o.check(gap80 > gap20, fmt("inout_ratio - greedy gap: %.4f at 20, %.4f at 80", gap20, gap80));
  return o;
}

Outcome split_superiority(CellCache& cells) {
  Outcome o;
  const auto compare = [&](StrategyKind better, StrategyKind worse, double center) {
    const auto& a = cells.get(better, 3, center);
    const auto& b = cells.get(worse, 3, center);
    const double gap = a.success_rate.mean - b.success_rate.mean;
    const double two_se = 2 * pooled(se(a, a.success_rate), se(b, b.success_rate));
    o.check(gap > two_se,
            fmt("amount %.0f: %s - %s = %.4f vs 2se %.4f", center, name(better), name(worse), gap, two_se));
  };
  for (const double center : {60.0, 70.0, 80.0}) {
    compare(StrategyKind::SplitProportional, StrategyKind::InOutRatio, center);
    compare(StrategyKind::SplitEqual, StrategyKind::Greedy, center);
  }
  return o;
}

Outcome fee_ordering(CellCache& cells) {
  Outcome o;
  double previous = INFINITY;
  for (int c = 1; c <= 7; ++c) {
    const double g = cells.get(StrategyKind::Greedy, c, 30).avg_relative_fee.mean;
    const double m = cells.get(StrategyKind::MaxFlow, c, 30).avg_relative_fee.mean;
    const double r = cells.get(StrategyKind::InOutRatio, c, 30).avg_relative_fee.mean;
    o.check(g <= m && g <= r && g <= previous,
            fmt("c=%d fee greedy %.6f  maxflow %.6f  inout_ratio %.6f", c, g, m, r));
    previous = g;
  }
  return o;
}

Outcome imbalance_ordering(CellCache& cells) {
  Outcome o;
  for (int c = 5; c <= 7; ++c) {
    const auto& in = cells.get(StrategyKind::InOutRatio, c, 30);
    const auto& gr = cells.get(StrategyKind::Greedy, c, 30);
    const double gap = gr.final_imbalance.mean - in.final_imbalance.mean;
    const double two_se = 2 * pooled(se(in, in.final_imbalance), se(gr, gr.final_imbalance));
    o.check(gap > two_se, fmt("c=%d imbalance greedy %.5f  inout_ratio %.5f  gap %.5f vs 2se %.5f", c,
                              gr.final_imbalance.mean, in.final_imbalance.mean, gap, two_se));
  }
  return o;
}

// ---------------------------------------------------------------------------

Outcome flow_oracles() {
  Outcome o;
  Rng rng(20240601);
  long flows = 0, multi = 0, paths = 0, mismatches = 0;
  for (int round = 0; round < 500; ++round) {
    Network net = test::random_small_network(rng, 8, 20, 0.5);
    if (round % 3 == 0) net.set_role(NodeId{0}, NodeRole::EndUser);
    const auto n = static_cast<std::uint32_t>(net.node_count());
    for (std::uint32_t s = 0; s < n; ++s) {
      for (std::uint32_t d = 0; d < n; ++d) {
        if (s == d) continue;
        const std::array src{NodeId{s}};
        ++flows;
        if (max_flow(net, NodeId{s}, NodeId{d}) != test::min_cut_oracle(net, src, NodeId{d})) ++mismatches;
        const double threshold = static_cast<double>(rng.below(12));
        const auto got = cheapest_path(prune(net, threshold), NodeId{s}, NodeId{d});
        const auto want = test::cheapest_by_enumeration(net, NodeId{s}, NodeId{d}, threshold);
        ++paths;
        if (got.has_value() != want.has_value() || (got && got->total_weight != want->weight)) ++mismatches;
      }
      std::vector<NodeId> sources;
      const NodeId sink{static_cast<std::uint32_t>(rng.below(n))};
      for (std::uint32_t v = 0; v < n; ++v) {
        if (v != sink.value && rng.coin()) sources.push_back(NodeId{v});
      }
      ++multi;
      if (multi_source_max_flow(net, sources, sink) != test::min_cut_oracle(net, sources, sink)) ++mismatches;
    }
  }
  o.check(mismatches == 0, fmt("500 networks: %ld max_flow, %ld multi_source, %ld cheapest_path checks, %ld "
                               "mismatches",
                               flows, multi, paths, mismatches));
  return o;
}

Outcome conservation_suite() {
  Outcome o;
  Rng rng(777);
  long payments = 0, failed = 0, injected = 0, split_success = 0;
  long capacity_violations = 0, rollback_violations = 0, partial_violations = 0;
  while (payments < 12000) {
    Network net = test::random_small_network(rng, 8, 20, 0.6);
    std::vector<NodeId> gateways;
    std::vector<NodeId> routers;
    for (std::uint32_t v = 0; v < net.node_count(); ++v) {
      (net.role(NodeId{v}) == NodeRole::Gateway ? gateways : routers).push_back(NodeId{v});
    }
    if (routers.empty()) continue;
    std::vector<double> capacity;
    for (const auto& ch : net.channels()) capacity.push_back(ch.capacity);
    const GatewaySet gws{gateways, {}};

    for (int step = 0; step < 30; ++step, ++payments) {
      const auto kind = kAllStrategies[rng.below(kAllStrategies.size())];
      const NodeId dest = routers[rng.below(routers.size())];
      const PaymentRequest req{static_cast<std::uint64_t>(payments), UserId{0}, dest, rng.uniform(0.5, 10)};
      const std::uint64_t mask = rng.below(3) == 0 ? rng.next() : 0;
      EngineOptions options;
      options.fail_chunk = [mask](std::size_t i) { return ((mask >> (i % 64)) & 1U) != 0; };
      if (mask != 0) ++injected;

      double received_before = 0.0;
      for (const auto& inc : net.incident(dest)) received_before += net.channel(inc.channel).balance_from(dest);
      const auto before = net.balance_snapshot();
      const auto result = execute_payment(net, req, gws, kind, options);

      if (!result.success) {
        ++failed;
        if (net.balance_snapshot() != before) ++rollback_violations;
      } else {
        double received = 0.0;
        for (const auto& inc : net.incident(dest)) received += net.channel(inc.channel).balance_from(dest);
        if (std::abs(received - received_before - req.amount) > 1e-9 * std::max(1.0, req.amount)) {
          ++partial_violations;
        }
        if (result.chunk_count > 1) ++split_success;
      }
      for (std::size_t i = 0; i < net.channel_count(); ++i) {
        const auto& ch = net.channel(i);
        if (ch.bal_ab < 0 || ch.bal_ba < 0 ||
            std::abs(ch.bal_ab + ch.bal_ba - capacity[i]) > 1e-9 * capacity[i]) {
          ++capacity_violations;
        }
      }
    }
  }
  o.notes.push_back(fmt("%ld payments, %ld failed, %ld with injected chunk failures, %ld multi-chunk successes",
                        payments, failed, injected, split_success));
  o.check(capacity_violations == 0, fmt("capacity/non-negativity violations: %ld", capacity_violations));
  o.check(rollback_violations == 0, fmt("failed payments that changed balances: %ld", rollback_violations));
  o.check(partial_violations == 0, fmt("successes not delivering the full amount: %ld", partial_violations));
  o.check(payments >= 10000 && split_success > 0, "coverage");
  return o;
}

Outcome fixture_regression() {
  Outcome o;
  auto f = test::make_f1();
  const GatewaySet both{{f.g1, f.g2}, {}};
  const StrategyOptions argmax{.ratio_argmin = false};
  const auto share = [](const std::optional<RoutePlan>& plan, NodeId g) {
    if (!plan) return -1.0;
    for (const auto& c : plan->chunks) {
      if (c.gateway == g) return c.amount;
    }
    return 0.0;
  };
  const auto gateway = [](const std::optional<RoutePlan>& plan) {
    return plan && plan->chunks.size() == 1 ? static_cast<long>(plan->chunks[0].gateway.value) : -1L;
  };

  o.check(channel_weight(f.net, f.g1, f.r) == 0.6 && channel_weight(f.net, f.r, f.d) == 0.5 &&
              channel_weight(f.net, f.g2, f.d) == 0.6 && channel_weight(f.net, f.g2, f.r) == 0.9,
          "weights g1->r 0.6, r->d 0.5, g2->d 0.6, g2->r 0.9");
  o.check(gateway_in_out_ratio(f.net, f.g1) == 1.5 && gateway_in_out_ratio(f.net, f.g2) == 4.0,
          "in/out ratios 1.5 and 4.0");
  const std::array gws{f.g1, f.g2};
  o.check(max_flow(f.net, f.g1, f.d) == 40 && max_flow(f.net, f.g2, f.d) == 30 &&
              multi_source_max_flow(f.net, gws, f.d) == 70,
          "flows 40 / 30 / 70");
  o.check(gateway(select_greedy(f.net, both, f.d, 15)) == f.g2.value, "greedy picks g2");
  o.check(gateway(select_maxflow(f.net, both, f.d, 15)) == f.g1.value, "maxflow picks g1");
  o.check(gateway(select_inout_ratio(f.net, both, f.d, 15, argmax)) == f.g2.value, "inout_ratio picks g2");
  const auto eq40 = plan_split_equal(f.net, both, f.d, 40);
  const auto eq50 = plan_split_equal(f.net, both, f.d, 50);
  o.check(share(eq40, f.g1) == 20 && share(eq40, f.g2) == 20, "split_equal 40 -> {g1:20, g2:20}");
  o.check(share(eq50, f.g1) == 30 && share(eq50, f.g2) == 20, "split_equal 50 -> {g1:30, g2:20}");
  const auto pr22 = plan_split_proportional(f.net, both, f.d, 22, argmax);
  const auto pr44 = plan_split_proportional(f.net, both, f.d, 44, argmax);
  o.check(share(pr22, f.g1) == 6 && share(pr22, f.g2) == 16,
          fmt("split_proportional 22 -> {g1:%.17g, g2:%.17g}", share(pr22, f.g1), share(pr22, f.g2)));
  o.check(share(pr44, f.g1) == 24 && share(pr44, f.g2) == 20,
          fmt("split_proportional 44 -> {g1:%.17g, g2:%.17g}", share(pr44, f.g1), share(pr44, f.g2)));
  return o;
}

// Criterion-1 experiment through the command line at jobs 1 and 8, compared
// with each other and with the library's own CSV rendering of the same cells.
Outcome determinism(const fs::path& work, CellCache& cells) {
  Outcome o;
  fs::create_directories(work);
  const auto config = work / "defaults.conf";
  std::ofstream(config) << "# all defaults\n";

  const auto sweep = [&](int jobs) {
    const auto out = work / ("jobs" + std::to_string(jobs));
    std::ostringstream sink_out;
    std::ostringstream sink_err;
    const int code = cli::run({"sweep", "--config", config.string(), "--out", out.string(), "--param", "amount",
                               "--values", "30", "--strategies", "greedy,maxflow,inout_ratio",
                               "--average-imbalance", "0,0.2,0.4,0.6,0.8", "--jobs", std::to_string(jobs),
                               "--force"},
                              sink_out, sink_err);
    if (code != cli::kExitOk) o.check(false, "pcnsim sweep failed: " + sink_err.str());
    return out;
  };
  const auto a = sweep(1);
  const auto b = sweep(8);
  for (const char* file : {"trials.csv", "aggregate.csv"}) {
    const auto x = slurp(a / file);
    const auto y = slurp(b / file);
    o.check(!x.empty() && x == y, fmt("%s identical at jobs 1 and 8 (%zu bytes)", file, x.size()));
  }

  std::vector<AggregateRow> rows;
  for (const auto s : {StrategyKind::Greedy, StrategyKind::MaxFlow, StrategyKind::InOutRatio}) {
    rows.push_back(cells.get(s, 3, 30));
  }
  std::ostringstream lib;
  write_aggregate_csv(lib, rows);
  o.check(lib.str() == slurp(a / "aggregate.csv"), "aggregate.csv matches the criterion-1 cells");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pcnsim acceptance run"};
  std::string work_dir = (fs::temp_directory_path() / "pcnsim_acceptance").string();
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "scratch directory for CLI outputs");
  app.add_option("--jobs", jobs, "worker threads for experiment cells")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run just these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };
  CellCache cells(jobs);
  const auto total = Clock::now();
  std::cout << "acceptance: jobs " << jobs << ", work dir " << work_dir << "\n";

  struct Entry {
    int number;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries{
      {9, "fixture regression", fixture_regression},
      {7, "flow and path oracle equivalence", flow_oracles},
      {8, "conservation and atomicity", conservation_suite},
      {1, "strategy ordering at amounts 25-35", [&] { return strategy_ordering(cells); }},
      {10, "determinism across jobs", [&] { return determinism(work_dir, cells); }},
      {2, "success at 5 connections", [&] { return five_connections(cells); }},
      {5, "fee ordering over connections", [&] { return fee_ordering(cells); }},
      {6, "imbalance ordering at 5+ connections", [&] { return imbalance_ordering(cells); }},
      {3, "amount degradation", [&] { return amount_degradation(cells); }},
      {4, "split superiority at large amounts", [&] { return split_superiority(cells); }},
  };
  for (const auto& e : entries) {
    if (!wanted(e.number)) continue;
    const auto start = Clock::now();
    const auto outcome = e.run();
    report(e.number, e.title, outcome, seconds_since(start));
  }

  if (!cells.rows().empty()) {
    fs::create_directories(work_dir);
    std::ofstream out(fs::path(work_dir) / "cells.csv");
    write_aggregate_csv(out, cells.rows());
  }
  std::cout << fmt("acceptance: %d failing, total %.1f s\n", g_failures, seconds_since(total));
  return g_failures == 0 ? 0 : 1;
}
