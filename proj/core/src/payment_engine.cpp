#include "pcn/payment_engine.hpp"

#include <algorithm>
#include <vector>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

std::vector<NodeId> transfer_route(const GatewaySet& gateways, const Path& path) {
  std::vector<NodeId> route;
  route.reserve(path.nodes.size() + 1);
  if (gateways.user) route.push_back(*gateways.user);
  route.insert(route.end(), path.nodes.begin(), path.nodes.end());
  return route;
}

PaymentResult failure(const PaymentRequest& request, FailureReason reason) {
  PaymentResult result;
  result.id = request.id;
  result.failure_reason = reason;
  return result;
}

}  // namespace

PaymentResult execute_payment(Network& net, const PaymentRequest& request, const GatewaySet& gateways,
                              StrategyKind strategy, const EngineOptions& options) {
  auto plan = plan_payment(strategy, net, gateways, request.destination, request.amount, options.strategy);
  if (!plan) return failure(request, FailureReason::NoPlan);
  return execute_plan(net, request, gateways, std::move(*plan), options);
}

PaymentResult execute_plan(Network& net, const PaymentRequest& request, const GatewaySet& gateways,
                           RoutePlan plan, const EngineOptions& options) {
  auto& chunks = plan.chunks;
  if (chunks.empty()) return failure(request, FailureReason::NoPlan);
  std::stable_sort(chunks.begin(), chunks.end(), [](const RouteChunk& x, const RouteChunk& y) {
    if (x.amount != y.amount) return x.amount > y.amount;
    return x.gateway < y.gateway;
  });

  std::vector<TransferReceipt> receipts;
  receipts.reserve(chunks.size());
  const auto rollback = [&] {
    for (auto it = receipts.rbegin(); it != receipts.rend(); ++it) net.undo(*it);
  };

  double fee = 0.0;
  double weighted_hops = 0.0;
  double placed = 0.0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    RouteChunk& chunk = chunks[i];
    if (options.fail_chunk && options.fail_chunk(i)) {
      rollback();
      return failure(request, FailureReason::ChunkExecutionFailed);
    }

    // Earlier chunks of this payment may have drained shared channels.
    auto route = transfer_route(gateways, chunk.path);
    if (path_bottleneck(net, route) < chunk.amount) {
      std::optional<Path> replanned;
      if (!gateways.user || net.balance(*gateways.user, chunk.gateway) >= chunk.amount) {
        replanned = cheapest_path(prune(net, chunk.amount), chunk.gateway, request.destination);
      }
      if (!replanned) {
        rollback();
        return failure(request, FailureReason::ChunkExecutionFailed);
      }
      chunk.path = std::move(*replanned);
      route = transfer_route(gateways, chunk.path);
    }

    try {
      receipts.push_back(net.apply_transfer(route, chunk.amount));
    } catch (const Error&) {
      rollback();
      return failure(request, FailureReason::ChunkExecutionFailed);
    }
    fee += route_fee(chunk.path, chunk.amount, options.fee_rate);
    weighted_hops += chunk.amount * static_cast<double>(chunk.path.hops());
    placed += chunk.amount;
  }

  PaymentResult result;
  result.id = request.id;
  result.success = true;
  result.total_fee = fee;
  result.hop_count = weighted_hops / placed;
  result.chunk_count = chunks.size();
  return result;
}

}  // namespace pcn
