#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pcn {

/// Opaque node identifier; dense index into the owning Network.
struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeRole : std::uint8_t { EndUser, Gateway, Router };

/// A payment channel between `a` and `b`. `bal_ab` is spendable from a to b,
/// `bal_ba` from b to a. The sum is the channel capacity and never changes.
struct Channel {
  NodeId a;
  NodeId b;
  double bal_ab = 0.0;
  double bal_ba = 0.0;
  double capacity = 0.0;

  double balance_from(NodeId from) const noexcept { return from == a ? bal_ab : bal_ba; }
  double balance_to(NodeId to) const noexcept { return to == a ? bal_ba : bal_ab; }
};

/// One entry of a node's adjacency list.
struct Incidence {
  std::size_t channel;
  NodeId neighbor;
};

/// Undo information for one applied transfer: the prior balances of every
/// touched channel, in application order.
struct TransferReceipt {
  struct Entry {
    std::size_t channel;
    double bal_ab;
    double bal_ba;
  };
  std::vector<Entry> entries;
};

class Network {
 public:
  NodeId add_node(NodeRole role);

  /// Adds a channel with the given directional balances. Throws
  /// std::invalid_argument on self-loops, duplicate pairs, negative balances
  /// or zero capacity.
  std::size_t add_channel(NodeId a, NodeId b, double bal_ab, double bal_ba);

  std::size_t node_count() const noexcept { return roles_.size(); }
  std::size_t channel_count() const noexcept { return channels_.size(); }

  NodeRole role(NodeId n) const { return roles_.at(n.value); }
  void set_role(NodeId n, NodeRole role) { roles_.at(n.value) = role; }
  bool is_backbone(NodeId n) const { return role(n) != NodeRole::EndUser; }
  bool contains(NodeId n) const noexcept { return n.value < roles_.size(); }

  std::span<const Channel> channels() const noexcept { return channels_; }
  const Channel& channel(std::size_t index) const { return channels_.at(index); }
  std::span<const Incidence> incident(NodeId n) const { return adjacency_.at(n.value); }

  std::optional<std::size_t> find_channel(NodeId u, NodeId v) const;

  /// Spendable balance u -> v. Throws NoSuchChannel.
  double balance(NodeId u, NodeId v) const;

  /// Moves `amount` along `path` hop by hop. Either every hop succeeds or the
  /// network is restored bit-for-bit and InsufficientBalance (or BrokenPath,
  /// checked before any mutation) is thrown.
  TransferReceipt apply_transfer(std::span<const NodeId> path, double amount);

  /// Restores the balances recorded in `receipt`. Receipts from several
  /// transfers must be undone in reverse order of application.
  void undo(const TransferReceipt& receipt);

  /// True when the Gateway/Router subgraph is connected (vacuously true when
  /// there are fewer than two backbone nodes).
  bool backbone_connected() const;

  /// Flattened (bal_ab, bal_ba) pairs in channel order.
  std::vector<double> balance_snapshot() const;

  /// Sum of all directional balances.
  double total_balance() const;

 private:
  std::vector<NodeRole> roles_;
  std::vector<Channel> channels_;
  std::vector<std::vector<Incidence>> adjacency_;
};

double directional_balance(const Network& net, NodeId u, NodeId v);

/// bal(v,u) / capacity: cheap to traverse when u holds most of the funds.
double channel_weight(const Network& net, NodeId u, NodeId v);

inline double channel_weight(const Channel& ch, NodeId from) noexcept {
  return (from == ch.a ? ch.bal_ba : ch.bal_ab) / (ch.bal_ab + ch.bal_ba);
}

/// Inbound and outbound balance totals over a gateway's backbone channels.
struct FlowTotals {
  double inbound = 0.0;
  double outbound = 0.0;
};

FlowTotals gateway_flow_totals(const Network& net, NodeId gateway);

/// total_in / total_out over the gateway's backbone channels. Throws
/// NotAGateway or ZeroOutbound.
double gateway_in_out_ratio(const Network& net, NodeId gateway);

/// Same as gateway_in_out_ratio but maps total_out == 0 to +infinity.
double gateway_priority(const Network& net, NodeId gateway);

/// Mean over channels of |bal_ab - bal_ba| / capacity. Throws EmptyNetwork.
double network_imbalance(const Network& net);

}  // namespace pcn
