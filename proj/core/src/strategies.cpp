#include "pcn/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pcn {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Placement residue tolerated before an allocation counts as failed.
constexpr double kAllocationTolerance = 1e-9;

std::vector<NodeId> sorted_gateways(const GatewaySet& gws, NodeId destination) {
  std::vector<NodeId> out = gws.gateways;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (std::find(out.begin(), out.end(), destination) != out.end()) {
    throw std::invalid_argument("destination is one of the user's gateways");
  }
  return out;
}

double access_limit(const Network& net, const GatewaySet& gws, NodeId gateway) {
  if (!gws.user) return kInfinity;
  return net.balance(*gws.user, gateway);
}

// Upper bound on any flow leaving `gateway`: its spendable balance toward
// neighbors that may carry the flow on.
double outbound_bound(const Network& net, NodeId gateway, NodeId destination) {
  double total = 0.0;
  for (const auto& inc : net.incident(gateway)) {
    if (net.role(inc.neighbor) == NodeRole::EndUser && inc.neighbor != destination) continue;
    total += net.channel(inc.channel).balance_from(gateway);
  }
  return total;
}

RoutePlan single_chunk(NodeId gateway, double amount, Path path) {
  RoutePlan plan;
  plan.chunks.push_back(RouteChunk{gateway, amount, std::move(path)});
  return plan;
}

std::optional<Path> feasible_path(const Network& net, const GatewaySet& gws, NodeId gateway, NodeId destination,
                                  double amount) {
  if (access_limit(net, gws, gateway) < amount) return std::nullopt;
  return cheapest_path(prune(net, amount), gateway, destination);
}

std::optional<RoutePlan> plan_split(const Network& net, const GatewaySet& gws, NodeId destination, double amount,
                                    bool proportional, bool inverse_weights) {
  const auto gateways = sorted_gateways(gws, destination);
  if (gateways.empty()) return std::nullopt;

  std::vector<double> caps;
  std::vector<double> weights;
  caps.reserve(gateways.size());
  weights.reserve(gateways.size());
  const auto widest = widest_bottlenecks_to(prune(net, 0.0), gateways, destination);
  for (std::size_t i = 0; i < gateways.size(); ++i) {
    const NodeId g = gateways[i];
    caps.push_back(std::min(widest[i], access_limit(net, gws, g)));
    double weight = 1.0;
    if (proportional) {
      weight = gateway_priority(net, g);
      if (inverse_weights) weight = weight == 0.0 ? kInfinity : (std::isinf(weight) ? 0.0 : 1.0 / weight);
    }
    weights.push_back(weight);
  }

  const auto shares = capped_allocation(amount, caps, weights);
  if (!shares) return std::nullopt;
  std::vector<double> limits;
  if (gws.user) {
    for (const auto g : gateways) limits.push_back(access_limit(net, gws, g));
  }
  if (!flow_reaches(net, gateways, destination, amount, limits)) return std::nullopt;

  RoutePlan plan;
  for (std::size_t i = 0; i < gateways.size(); ++i) {
    const double share = (*shares)[i];
    if (!(share > 0.0)) continue;
    auto path = cheapest_path(prune(net, share), gateways[i], destination);
    if (!path) return std::nullopt;
    plan.chunks.push_back(RouteChunk{gateways[i], share, std::move(*path)});
  }
  if (plan.chunks.empty()) return std::nullopt;
  return plan;
}

}  // namespace

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::Greedy: return "greedy";
    case StrategyKind::MaxFlow: return "maxflow";
    case StrategyKind::InOutRatio: return "inout_ratio";
    case StrategyKind::SplitEqual: return "split_equal";
    case StrategyKind::SplitProportional: return "split_proportional";
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) noexcept {
  for (const auto kind : kAllStrategies) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

double RoutePlan::total_amount() const noexcept {
  double total = 0.0;
  for (const auto& chunk : chunks) total += chunk.amount;
  return total;
}

double gateway_chunk_cap(const Network& net, const GatewaySet& gws, NodeId gateway, NodeId destination) {
  const double widest = widest_bottleneck(prune(net, 0.0), gateway, destination);
  return std::min(widest, access_limit(net, gws, gateway));
}

std::optional<RoutePlan> select_greedy(const Network& net, const GatewaySet& gws, NodeId destination,
                                       double amount) {
  std::optional<RoutePlan> best;
  double best_weight = kInfinity;
  for (const auto g : sorted_gateways(gws, destination)) {
    auto path = feasible_path(net, gws, g, destination, amount);
    if (!path) continue;
    if (!best || path->total_weight < best_weight) {
      best_weight = path->total_weight;
      best = single_chunk(g, amount, std::move(*path));
    }
  }
  return best;
}

std::optional<RoutePlan> select_maxflow(const Network& net, const GatewaySet& gws, NodeId destination,
                                        double amount) {
  // The winner is the feasible gateway with the largest flow (ties: smallest
  // id). A feasible gateway always has flow >= amount > 0.
  struct Candidate {
    NodeId gateway;
    Path path;
  };
  std::vector<Candidate> feasible;
  for (const auto g : sorted_gateways(gws, destination)) {
    if (auto path = feasible_path(net, gws, g, destination, amount)) feasible.push_back({g, std::move(*path)});
  }
  if (feasible.empty()) return std::nullopt;

  std::size_t best = 0;
  double best_flow = -1.0;
  for (std::size_t i = 0; i < feasible.size() && feasible.size() > 1; ++i) {
    const NodeId g = feasible[i].gateway;
    const double access = access_limit(net, gws, g);
    if (std::min(outbound_bound(net, g, destination), access) <= best_flow) continue;
    const double flow = std::min(max_flow(net, g, destination), access);
    if (flow > best_flow) {
      best_flow = flow;
      best = i;
    }
  }
  return single_chunk(feasible[best].gateway, amount, std::move(feasible[best].path));
}

std::optional<RoutePlan> select_inout_ratio(const Network& net, const GatewaySet& gws, NodeId destination,
                                            double amount, const StrategyOptions& options) {
  struct Candidate {
    NodeId gateway;
    double ratio;
  };
  std::vector<Candidate> candidates;
  for (const auto g : sorted_gateways(gws, destination)) candidates.push_back({g, gateway_priority(net, g)});
  if (options.ratio_argmin) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.ratio < y.ratio; });
  } else {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.ratio > y.ratio; });
  }

  // The first feasible candidate in priority order is the best feasible one.
  for (const auto& c : candidates) {
    if (auto path = feasible_path(net, gws, c.gateway, destination, amount)) {
      return single_chunk(c.gateway, amount, std::move(*path));
    }
  }
  return std::nullopt;
}

std::optional<RoutePlan> plan_split_equal(const Network& net, const GatewaySet& gws, NodeId destination,
                                          double amount) {
  return plan_split(net, gws, destination, amount, false, false);
}

std::optional<RoutePlan> plan_split_proportional(const Network& net, const GatewaySet& gws, NodeId destination,
                                                 double amount, const StrategyOptions& options) {
  return plan_split(net, gws, destination, amount, true, options.ratio_argmin);
}

std::optional<RoutePlan> plan_payment(StrategyKind kind, const Network& net, const GatewaySet& gws,
                                      NodeId destination, double amount, const StrategyOptions& options) {
  if (!(amount > 0.0)) throw std::invalid_argument("payment amount must be positive");
  switch (kind) {
    case StrategyKind::Greedy: return select_greedy(net, gws, destination, amount);
    case StrategyKind::MaxFlow: return select_maxflow(net, gws, destination, amount);
    case StrategyKind::InOutRatio: return select_inout_ratio(net, gws, destination, amount, options);
    case StrategyKind::SplitEqual: return plan_split_equal(net, gws, destination, amount);
    case StrategyKind::SplitProportional: return plan_split_proportional(net, gws, destination, amount, options);
  }
  return std::nullopt;
}

std::optional<std::vector<double>> capped_allocation(double amount, std::span<const double> caps,
                                                     std::span<const double> weights) {
  if (caps.size() != weights.size()) throw std::invalid_argument("caps and weights must have equal length");
  const std::size_t n = caps.size();
  std::vector<double> shares(n, 0.0);
  std::vector<char> active(n, 1);
  std::vector<double> effective(n, 0.0);
  double remaining = amount;
  std::size_t active_count = n;

  // Each round pins at least one participant, so n + 1 rounds suffice.
  for (std::size_t round = 0; round <= n && active_count > 0; ++round) {
    bool any_infinite = false;
    double finite_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (std::isinf(weights[i])) {
        any_infinite = true;
      } else {
        finite_sum += weights[i];
      }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      if (any_infinite) {
        effective[i] = std::isinf(weights[i]) ? 1.0 : 0.0;
      } else if (finite_sum > 0.0) {
        effective[i] = weights[i];
      } else {
        effective[i] = 1.0;
      }
      sum += effective[i];
    }

    bool pinned = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i] && remaining * effective[i] / sum > caps[i]) pinned = true;
    }
    if (!pinned) {
      for (std::size_t i = 0; i < n; ++i) {
        if (active[i]) shares[i] = remaining * effective[i] / sum;
      }
      return shares;
    }
    // Targets are computed against the pre-round remainder.
    const double round_remaining = remaining;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || !(round_remaining * effective[i] / sum > caps[i])) continue;
      shares[i] = caps[i];
      remaining -= caps[i];
      active[i] = 0;
      --active_count;
    }
    if (remaining <= amount * kAllocationTolerance) return shares;
  }
  if (remaining <= amount * kAllocationTolerance) return shares;
  return std::nullopt;
}

}  // namespace pcn
