#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "pcn/network.hpp"
#include "pcn/strategies.hpp"

namespace pcn {

/// Index into the trial's end-user population.
struct UserId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(const UserId&, const UserId&) = default;
};

struct PaymentRequest {
  std::uint64_t id = 0;
  UserId source_user;
  NodeId destination;
  double amount = 0.0;
};

enum class FailureReason { NoPlan, ChunkExecutionFailed };

struct PaymentResult {
  std::uint64_t id = 0;
  bool success = false;
  double total_fee = 0.0;
  /// Chunk-amount-weighted mean of backbone hop counts.
  double hop_count = 0.0;
  std::size_t chunk_count = 0;
  std::optional<FailureReason> failure_reason;
};

struct EngineOptions {
  double fee_rate = 0.01;
  StrategyOptions strategy;
  /// Test hook: returning true for a chunk index (in execution order) makes
  /// that chunk fail as if its path had been consumed.
  std::function<bool(std::size_t)> fail_chunk;
};

/// Plans `request` with `strategy` and executes it all-or-nothing. Failures
/// are reported in the result; the network is then bit-identical to its
/// state before the call.
PaymentResult execute_payment(Network& net, const PaymentRequest& request, const GatewaySet& gateways,
                              StrategyKind strategy, const EngineOptions& options = {});

/// Executes an existing plan with the same semantics as execute_payment.
PaymentResult execute_plan(Network& net, const PaymentRequest& request, const GatewaySet& gateways,
                           RoutePlan plan, const EngineOptions& options = {});

}  // namespace pcn
