#include "pcn/network.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

std::string hop_label(NodeId u, NodeId v) {
  return std::to_string(u.value) + "->" + std::to_string(v.value);
}

}  // namespace

NodeId Network::add_node(NodeRole role) {
  roles_.push_back(role);
  adjacency_.emplace_back();
  return NodeId{static_cast<std::uint32_t>(roles_.size() - 1)};
}

std::size_t Network::add_channel(NodeId a, NodeId b, double bal_ab, double bal_ba) {
  if (!contains(a) || !contains(b)) throw std::invalid_argument("channel endpoint is not a declared node");
  if (a == b) throw std::invalid_argument("self-loop channel");
  if (find_channel(a, b)) throw std::invalid_argument("duplicate channel " + hop_label(a, b));
  if (!(bal_ab >= 0.0) || !(bal_ba >= 0.0)) throw std::invalid_argument("negative channel balance");
  const double capacity = bal_ab + bal_ba;
  if (!(capacity > 0.0) || !std::isfinite(capacity)) throw std::invalid_argument("channel capacity must be positive");

  channels_.push_back(Channel{a, b, bal_ab, bal_ba, capacity});
  const std::size_t index = channels_.size() - 1;
  adjacency_[a.value].push_back(Incidence{index, b});
  adjacency_[b.value].push_back(Incidence{index, a});
  return index;
}

std::optional<std::size_t> Network::find_channel(NodeId u, NodeId v) const {
  if (!contains(u) || !contains(v)) return std::nullopt;
  for (const auto& inc : adjacency_[u.value]) {
    if (inc.neighbor == v) return inc.channel;
  }
  return std::nullopt;
}

double Network::balance(NodeId u, NodeId v) const {
  const auto index = find_channel(u, v);
  if (!index) throw NoSuchChannel("no channel " + hop_label(u, v));
  return channels_[*index].balance_from(u);
}

TransferReceipt Network::apply_transfer(std::span<const NodeId> path, double amount) {
  if (path.size() < 2) throw std::invalid_argument("transfer path needs at least two nodes");
  if (!(amount > 0.0)) throw std::invalid_argument("transfer amount must be positive");

  std::vector<std::size_t> hops;
  hops.reserve(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto index = find_channel(path[i], path[i + 1]);
    if (!index) throw BrokenPath("no channel for hop " + hop_label(path[i], path[i + 1]));
    hops.push_back(*index);
  }

  TransferReceipt receipt;
  receipt.entries.reserve(hops.size());
  for (std::size_t i = 0; i < hops.size(); ++i) {
    Channel& ch = channels_[hops[i]];
    const bool forward = path[i] == ch.a;
    double& out = forward ? ch.bal_ab : ch.bal_ba;
    double& in = forward ? ch.bal_ba : ch.bal_ab;
    if (out < amount) {
      undo(receipt);
      throw InsufficientBalance(i, "insufficient balance on hop " + hop_label(path[i], path[i + 1]));
    }
    receipt.entries.push_back({hops[i], ch.bal_ab, ch.bal_ba});
    out -= amount;
    in += amount;
  }
  return receipt;
}

void Network::undo(const TransferReceipt& receipt) {
  for (auto it = receipt.entries.rbegin(); it != receipt.entries.rend(); ++it) {
    Channel& ch = channels_.at(it->channel);
    ch.bal_ab = it->bal_ab;
    ch.bal_ba = it->bal_ba;
  }
}

bool Network::backbone_connected() const {
  std::vector<char> seen(node_count(), 0);
  std::vector<std::uint32_t> stack;
  std::size_t backbone = 0;
  for (std::uint32_t i = 0; i < node_count(); ++i) {
    if (roles_[i] == NodeRole::EndUser) continue;
    ++backbone;
    if (stack.empty() && backbone == 1) {
      stack.push_back(i);
      seen[i] = 1;
    }
  }
  std::size_t reached = 0;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    ++reached;
    for (const auto& inc : adjacency_[u]) {
      const auto v = inc.neighbor.value;
      if (seen[v] || roles_[v] == NodeRole::EndUser) continue;
      seen[v] = 1;
      stack.push_back(v);
    }
  }
  return reached == backbone;
}

std::vector<double> Network::balance_snapshot() const {
  std::vector<double> out;
  out.reserve(channels_.size() * 2);
  for (const auto& ch : channels_) {
    out.push_back(ch.bal_ab);
    out.push_back(ch.bal_ba);
  }
  return out;
}

double Network::total_balance() const {
  double total = 0.0;
  for (const auto& ch : channels_) total += ch.bal_ab + ch.bal_ba;
  return total;
}

double directional_balance(const Network& net, NodeId u, NodeId v) { return net.balance(u, v); }

double channel_weight(const Network& net, NodeId u, NodeId v) {
  const auto index = net.find_channel(u, v);
  if (!index) throw NoSuchChannel("no channel " + hop_label(u, v));
  return channel_weight(net.channel(*index), u);
}

FlowTotals gateway_flow_totals(const Network& net, NodeId gateway) {
  if (!net.contains(gateway) || net.role(gateway) != NodeRole::Gateway) {
    throw NotAGateway("node " + std::to_string(gateway.value) + " is not a gateway");
  }
  FlowTotals totals;
  for (const auto& inc : net.incident(gateway)) {
    if (!net.is_backbone(inc.neighbor)) continue;
    const Channel& ch = net.channel(inc.channel);
    totals.outbound += ch.balance_from(gateway);
    totals.inbound += ch.balance_to(gateway);
  }
  return totals;
}

double gateway_in_out_ratio(const Network& net, NodeId gateway) {
  const FlowTotals totals = gateway_flow_totals(net, gateway);
  if (totals.outbound == 0.0) {
    throw ZeroOutbound("gateway " + std::to_string(gateway.value) + " has no outbound balance");
  }
  return totals.inbound / totals.outbound;
}

double gateway_priority(const Network& net, NodeId gateway) {
  const FlowTotals totals = gateway_flow_totals(net, gateway);
  if (totals.outbound == 0.0) return std::numeric_limits<double>::infinity();
  return totals.inbound / totals.outbound;
}

double network_imbalance(const Network& net) {
  if (net.channel_count() == 0) throw EmptyNetwork("network has no channels");
  double sum = 0.0;
  for (const auto& ch : net.channels()) sum += std::abs(ch.bal_ab - ch.bal_ba) / (ch.bal_ab + ch.bal_ba);
  return sum / static_cast<double>(net.channel_count());
}

}  // namespace pcn
