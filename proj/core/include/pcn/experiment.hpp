#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/payment_engine.hpp"
#include "pcn/strategies.hpp"

namespace pcn {

struct ExperimentConfig {
  int nodes = 100;
  int degree = 3;
  double cap_min = 50.0;
  double cap_max = 150.0;
  int payments = 5000;
  double amount_min = 5.0;
  double amount_max = 85.0;
  int connections = 3;
  double imbalance = 0.0;
  double fee_rate = 0.01;
  StrategyKind strategy = StrategyKind::InOutRatio;
  std::uint64_t seed = 1;
  int replications = 75;
  bool track_user_channels = false;
  bool ratio_argmin = true;

  /// Throws InvalidConfig naming the first violated constraint.
  void validate() const;
};

struct EndUser {
  UserId id;
  std::vector<NodeId> gateways;  // sorted
  std::optional<NodeId> node;    // set when user channels are tracked
};

/// A generated backbone plus the end-user population attached to it.
struct SimNetwork {
  Network network;
  std::vector<EndUser> users;

  GatewaySet gateway_set(UserId user) const;
};

/// Random regular backbone (configuration model with rejection), uniform
/// capacities, balances split by the imbalance rate, and user attachments.
SimNetwork generate_network(const ExperimentConfig& cfg, std::uint64_t seed);

std::vector<PaymentRequest> generate_workload(const ExperimentConfig& cfg, const SimNetwork& sim,
                                              std::uint64_t seed);

struct TrialMetrics {
  double success_rate = 0.0;
  double avg_relative_fee = 0.0;
  double avg_hop_count = 0.0;
  double final_imbalance = 0.0;

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

struct TrialRun {
  TrialMetrics metrics;
  std::vector<PaymentResult> results;
};

/// Executes `workload` in order against `sim` and summarizes it.
TrialRun simulate(const ExperimentConfig& cfg, SimNetwork& sim, std::span<const PaymentRequest> workload);

/// Generates network and workload from `seed` (or uses `imported` payments)
/// and runs them.
TrialRun run_trial_detailed(const ExperimentConfig& cfg, std::uint64_t seed,
                            const std::vector<PaymentRequest>* imported = nullptr);

TrialMetrics run_trial(const ExperimentConfig& cfg, std::uint64_t seed);

/// One per-trial output row.
struct TrialRecord {
  StrategyKind strategy;
  int connections;
  double amount_min;
  double amount_max;
  double imbalance;
  std::uint64_t seed;
  TrialMetrics metrics;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

/// One aggregate output row. With several imbalance strata the mean is the
/// mean of stratum means and stddev the pooled within-stratum deviation.
struct AggregateRow {
  StrategyKind strategy;
  int connections;
  double amount_min;
  double amount_max;
  double imbalance;
  std::uint64_t seed;
  std::size_t trials;
  MetricSummary success_rate;
  MetricSummary avg_relative_fee;
  MetricSummary avg_hop_count;
  MetricSummary final_imbalance;
};

/// stddev / sqrt(trials).
double standard_error(const AggregateRow& row, const MetricSummary& metric);

/// Aggregates trial strata (each a list of trials sharing one configuration).
AggregateRow aggregate(const ExperimentConfig& key, std::span<const std::vector<TrialMetrics>> strata);

struct RunOptions {
  int jobs = 1;
  const std::vector<PaymentRequest>* imported = nullptr;
};

struct ExperimentReport {
  std::vector<TrialRecord> trials;
  AggregateRow aggregate;
};

/// Runs `replications` trials with seeds seed, seed+1, ...
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

enum class SweepParameter { Connections, Amount, Imbalance };

std::string_view to_string(SweepParameter p) noexcept;
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept;

/// Returns `cfg` with the axis set to `value`. Amount values are band
/// centers: [value - 5, value + 5].
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepParameter p, double value);

struct SweepOptions {
  int jobs = 1;
  /// When non-empty, every cell is averaged over these imbalance rates.
  std::vector<double> average_imbalance;
};

struct SweepReport {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> rows;
};

/// Cross product of strategies x values (in the given orders).
SweepReport run_sweep(const ExperimentConfig& cfg, SweepParameter p, std::span<const double> values,
                      std::span<const StrategyKind> strategies, const SweepOptions& options = {});

// CSV interfaces. Every writer emits LF line endings.
void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);
void write_payments_csv(std::ostream& out, std::span<const PaymentRequest> payments);
/// Throws ParseError on a malformed file.
std::vector<PaymentRequest> read_payments_csv(std::istream& in);

}  // namespace pcn
