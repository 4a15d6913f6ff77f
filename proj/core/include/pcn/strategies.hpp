#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/routing.hpp"

namespace pcn {

enum class StrategyKind { Greedy, MaxFlow, InOutRatio, SplitEqual, SplitProportional };

inline constexpr std::array<StrategyKind, 5> kAllStrategies = {
    StrategyKind::Greedy, StrategyKind::MaxFlow, StrategyKind::InOutRatio, StrategyKind::SplitEqual,
    StrategyKind::SplitProportional};

/// Config/CLI name: greedy, maxflow, inout_ratio, split_equal, split_proportional.
std::string_view to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_strategy(std::string_view name) noexcept;

/// The gateways an end-user may start a payment from. When `user` is set the
/// user is a node of the network and each gateway is additionally limited by
/// the user->gateway balance; otherwise access channels are unlimited.
struct GatewaySet {
  std::vector<NodeId> gateways;
  std::optional<NodeId> user;
};

struct RouteChunk {
  NodeId gateway;
  double amount = 0.0;
  Path path;  // gateway ... destination
};

struct RoutePlan {
  std::vector<RouteChunk> chunks;

  double total_amount() const noexcept;
};

struct StrategyOptions {
  /// Orientation of the in/out ratio criterion. When true the single-path
  /// selection prefers the lowest ratio (most outbound balance) and the
  /// proportional split weights gateways by out/in. When false it prefers
  /// the highest ratio and weights by in/out.
  bool ratio_argmin = true;
};

std::optional<RoutePlan> select_greedy(const Network& net, const GatewaySet& gws, NodeId destination, double amount);
std::optional<RoutePlan> select_maxflow(const Network& net, const GatewaySet& gws, NodeId destination, double amount);
std::optional<RoutePlan> select_inout_ratio(const Network& net, const GatewaySet& gws, NodeId destination,
                                            double amount, const StrategyOptions& options = {});
std::optional<RoutePlan> plan_split_equal(const Network& net, const GatewaySet& gws, NodeId destination,
                                          double amount);
std::optional<RoutePlan> plan_split_proportional(const Network& net, const GatewaySet& gws, NodeId destination,
                                                 double amount, const StrategyOptions& options = {});

std::optional<RoutePlan> plan_payment(StrategyKind kind, const Network& net, const GatewaySet& gws,
                                      NodeId destination, double amount, const StrategyOptions& options = {});

/// Distributes `amount` over participants in proportion to `weights`, never
/// exceeding `caps`; a participant whose target exceeds its cap is pinned to
/// the cap and the rest is re-divided among the others. Infinite weights take
/// precedence over finite ones; an all-zero weight set divides equally.
/// Returns nullopt when the caps cannot absorb the amount.
std::optional<std::vector<double>> capped_allocation(double amount, std::span<const double> caps,
                                                     std::span<const double> weights);

/// Single-path cap for a chunk from `gateway`: the widest-path bottleneck to
/// the destination, limited by the access channel when the user is tracked.
double gateway_chunk_cap(const Network& net, const GatewaySet& gws, NodeId gateway, NodeId destination);

}  // namespace pcn
