#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcn/network.hpp"

namespace pcn {

struct DirectedEdge {
  NodeId from;
  NodeId to;

  friend constexpr auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Read-only view of a network keeping only directions whose balance is at
/// least `threshold`. Holds a reference; the network must outlive the view.
class PrunedView {
 public:
  PrunedView(const Network& net, double threshold) noexcept : net_(&net), threshold_(threshold) {}

  const Network& network() const noexcept { return *net_; }
  double threshold() const noexcept { return threshold_; }

  bool allows(const Channel& ch, NodeId from) const noexcept { return ch.balance_from(from) >= threshold_; }
  bool has_edge(NodeId u, NodeId v) const;

  /// Materialized edge set, ordered by (from, to).
  std::vector<DirectedEdge> edges() const;

 private:
  const Network* net_;
  double threshold_;
};

PrunedView prune(const Network& net, double amount);

struct Path {
  std::vector<NodeId> nodes;
  double total_weight = 0.0;
  double bottleneck = 0.0;

  std::size_t hops() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Minimum bottleneck of `nodes` against the current balances of `net`
/// (+infinity for a single node). Throws BrokenPath on a missing channel.
double path_bottleneck(const Network& net, std::span<const NodeId> nodes);

/// Sum of channel weights along `nodes`, accumulated from the first hop.
double path_weight(const Network& net, std::span<const NodeId> nodes);

// End-user nodes never relay: every routine below only enters or leaves an
// EndUser node when it is an endpoint (or a flow source).

/// Minimum-weight simple path on the pruned edge set. Ties go to fewer hops,
/// then to the lexicographically smallest node sequence.
std::optional<Path> cheapest_path(const PrunedView& view, NodeId source, NodeId destination);

/// Maximum-bottleneck value over s->d paths of the view; 0 when unreachable.
double widest_bottleneck(const PrunedView& view, NodeId source, NodeId destination);

/// widest_bottleneck(view, s, destination) for every s in `sources`, from a
/// single search rooted at the destination.
std::vector<double> widest_bottlenecks_to(const PrunedView& view, std::span<const NodeId> sources,
                                          NodeId destination);

/// Edmonds-Karp max flow with directional balances as arc capacities.
double max_flow(const Network& net, NodeId source, NodeId destination);

/// Max flow from a virtual super-source. `source_limits`, when non-empty,
/// caps the arc into each source (parallel to `sources`); otherwise those arcs
/// are unbounded.
double multi_source_max_flow(const Network& net, std::span<const NodeId> sources, NodeId destination,
                             std::span<const double> source_limits = {});

/// Whether multi_source_max_flow(...) >= amount; stops augmenting as soon as
/// the answer is known.
bool flow_reaches(const Network& net, std::span<const NodeId> sources, NodeId destination, double amount,
                  std::span<const double> source_limits = {});

/// Proportional per-hop fee; metric only, never deducted from balances.
double route_fee(const Path& path, double amount, double fee_rate);

}  // namespace pcn
