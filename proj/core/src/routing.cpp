#include "pcn/routing.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

bool may_relay(const Network& net, NodeId node, NodeId source) {
  return node == source || net.role(node) != NodeRole::EndUser;
}

void require_distinct(const Network& net, NodeId source, NodeId destination) {
  if (!net.contains(source) || !net.contains(destination)) throw std::out_of_range("unknown node");
  if (source == destination) throw std::invalid_argument("source and destination must differ");
}

// Given two settled nodes whose best paths from the same source have equal hop
// counts, reports whether the path to `a` is lexicographically smaller than
// the path to `b`.
bool lex_less(std::uint32_t a, std::uint32_t b, const std::vector<std::uint32_t>& pred) {
  std::uint32_t first_a = a;
  std::uint32_t first_b = b;
  while (a != b && a != kNone && b != kNone) {
    first_a = a;
    first_b = b;
    a = pred[a];
    b = pred[b];
  }
  return first_a < first_b;
}

// Residual network for augmenting-path max flow. Each channel contributes one
// pair of antiparallel arcs that serve as each other's reverse.
class ResidualGraph {
 public:
  explicit ResidualGraph(std::size_t nodes) : head_(nodes, kNone) {}

  void add_pair(std::uint32_t u, std::uint32_t v, double cap_uv, double cap_vu) {
    add_arc(u, v, cap_uv);
    add_arc(v, u, cap_vu);
  }

  /// Augments until no path remains or the flow reaches `stop_at`.
  double edmonds_karp(std::uint32_t source, std::uint32_t sink, double stop_at = kInfinity) {
    double total = 0.0;
    std::vector<std::uint32_t> parent_arc(head_.size());
    std::vector<std::uint32_t> queue;
    queue.reserve(head_.size());
    for (;;) {
      std::fill(parent_arc.begin(), parent_arc.end(), kNone);
      queue.clear();
      queue.push_back(source);
      bool reached = false;
      for (std::size_t qi = 0; qi < queue.size() && !reached; ++qi) {
        const auto u = queue[qi];
        for (auto arc = head_[u]; arc != kNone; arc = arcs_[arc].next) {
          const auto v = arcs_[arc].to;
          if (v == source || parent_arc[v] != kNone || !(arcs_[arc].residual > 0.0)) continue;
          parent_arc[v] = arc;
          if (v == sink) {
            reached = true;
            break;
          }
          queue.push_back(v);
        }
      }
      if (!reached) return total;

      double bottleneck = kInfinity;
      for (auto v = sink; v != source; v = arcs_[parent_arc[v] ^ 1U].to) {
        bottleneck = std::min(bottleneck, arcs_[parent_arc[v]].residual);
      }
      for (auto v = sink; v != source; v = arcs_[parent_arc[v] ^ 1U].to) {
        arcs_[parent_arc[v]].residual -= bottleneck;
        arcs_[parent_arc[v] ^ 1U].residual += bottleneck;
      }
      total += bottleneck;
      if (total >= stop_at) return total;
    }
  }

 private:
  struct Arc {
    std::uint32_t to;
    std::uint32_t next;
    double residual;
  };

  void add_arc(std::uint32_t u, std::uint32_t v, double cap) {
    arcs_.push_back(Arc{v, head_[u], cap});
    head_[u] = static_cast<std::uint32_t>(arcs_.size() - 1);
  }

  std::vector<std::uint32_t> head_;
  std::vector<Arc> arcs_;
};

// Adds every channel usable for relaying. `is_terminal` marks nodes allowed to
// be EndUsers (sources and sink).
void load_channels(const Network& net, ResidualGraph& graph, const std::vector<char>& is_terminal) {
  for (const auto& ch : net.channels()) {
    const bool a_ok = net.role(ch.a) != NodeRole::EndUser || is_terminal[ch.a.value];
    const bool b_ok = net.role(ch.b) != NodeRole::EndUser || is_terminal[ch.b.value];
    if (!a_ok || !b_ok) continue;
    graph.add_pair(ch.a.value, ch.b.value, ch.bal_ab, ch.bal_ba);
  }
}

}  // namespace

bool PrunedView::has_edge(NodeId u, NodeId v) const {
  const auto index = net_->find_channel(u, v);
  return index && allows(net_->channel(*index), u);
}

std::vector<DirectedEdge> PrunedView::edges() const {
  std::vector<DirectedEdge> out;
  for (const auto& ch : net_->channels()) {
    if (allows(ch, ch.a)) out.push_back({ch.a, ch.b});
    if (allows(ch, ch.b)) out.push_back({ch.b, ch.a});
  }
  std::sort(out.begin(), out.end());
  return out;
}

PrunedView prune(const Network& net, double amount) {
  if (!(amount >= 0.0)) throw std::invalid_argument("prune amount must be non-negative");
  return PrunedView(net, amount);
}

double path_bottleneck(const Network& net, std::span<const NodeId> nodes) {
  double bottleneck = kInfinity;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto index = net.find_channel(nodes[i], nodes[i + 1]);
    if (!index) throw BrokenPath("path hop without channel");
    bottleneck = std::min(bottleneck, net.channel(*index).balance_from(nodes[i]));
  }
  return bottleneck;
}

double path_weight(const Network& net, std::span<const NodeId> nodes) {
  double weight = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const auto index = net.find_channel(nodes[i], nodes[i + 1]);
    if (!index) throw BrokenPath("path hop without channel");
    weight += channel_weight(net.channel(*index), nodes[i]);
  }
  return weight;
}

std::optional<Path> cheapest_path(const PrunedView& view, NodeId source, NodeId destination) {
  const Network& net = view.network();
  require_distinct(net, source, destination);

  const std::size_t n = net.node_count();
  std::vector<double> cost(n, kInfinity);
  std::vector<std::uint32_t> hops(n, kNone);
  std::vector<std::uint32_t> pred(n, kNone);
  std::vector<char> settled(n, 0);

  using Label = std::tuple<double, std::uint32_t, std::uint32_t>;
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  cost[source.value] = 0.0;
  hops[source.value] = 0;
  heap.emplace(0.0, 0U, source.value);

  while (!heap.empty()) {
    const auto [c, h, u] = heap.top();
    heap.pop();
    if (settled[u] || c != cost[u] || h != hops[u]) continue;
    settled[u] = 1;
    if (u == destination.value) break;
    if (!may_relay(net, NodeId{u}, source)) continue;

    for (const auto& inc : net.incident(NodeId{u})) {
      const auto v = inc.neighbor.value;
      if (settled[v]) continue;
      const Channel& ch = net.channel(inc.channel);
      if (!view.allows(ch, NodeId{u})) continue;
      const double nc = c + channel_weight(ch, NodeId{u});
      const std::uint32_t nh = h + 1;
      bool better = nc < cost[v];
      if (!better && nc == cost[v]) {
        better = nh < hops[v] || (nh == hops[v] && lex_less(u, pred[v], pred));
      }
      if (!better) continue;
      cost[v] = nc;
      hops[v] = nh;
      pred[v] = u;
      heap.emplace(nc, nh, v);
    }
  }

  if (!settled[destination.value]) return std::nullopt;

  Path path;
  path.total_weight = cost[destination.value];
  for (auto v = destination.value; v != kNone; v = pred[v]) path.nodes.push_back(NodeId{v});
  std::reverse(path.nodes.begin(), path.nodes.end());
  path.bottleneck = path_bottleneck(net, path.nodes);
  return path;
}

double widest_bottleneck(const PrunedView& view, NodeId source, NodeId destination) {
  const Network& net = view.network();
  require_distinct(net, source, destination);

  const std::size_t n = net.node_count();
  std::vector<double> best(n, -1.0);
  std::vector<char> settled(n, 0);
  std::priority_queue<std::pair<double, std::uint32_t>> heap;
  best[source.value] = kInfinity;
  heap.emplace(kInfinity, source.value);

  while (!heap.empty()) {
    const auto [width, u] = heap.top();
    heap.pop();
    if (settled[u] || width != best[u]) continue;
    settled[u] = 1;
    if (u == destination.value) break;
    if (!may_relay(net, NodeId{u}, source)) continue;
    for (const auto& inc : net.incident(NodeId{u})) {
      const auto v = inc.neighbor.value;
      if (settled[v]) continue;
      const Channel& ch = net.channel(inc.channel);
      if (!view.allows(ch, NodeId{u})) continue;
      const double w = std::min(width, ch.balance_from(NodeId{u}));
      if (w > best[v]) {
        best[v] = w;
        heap.emplace(w, v);
      }
    }
  }
  return std::max(best[destination.value], 0.0);
}

std::vector<double> widest_bottlenecks_to(const PrunedView& view, std::span<const NodeId> sources,
                                          NodeId destination) {
  const Network& net = view.network();
  if (!net.contains(destination)) throw std::out_of_range("unknown node");
  const std::size_t n = net.node_count();
  std::vector<char> wanted(n, 0);
  std::size_t pending = 0;
  for (const auto s : sources) {
    if (!net.contains(s)) throw std::out_of_range("unknown node");
    if (s == destination) throw std::invalid_argument("source and destination must differ");
    if (!wanted[s.value]) ++pending;
    wanted[s.value] = 1;
  }

  // Max-bottleneck search over reversed arcs: best[v] is the widest v -> d value.
  std::vector<double> best(n, -1.0);
  std::vector<char> settled(n, 0);
  std::priority_queue<std::pair<double, std::uint32_t>> heap;
  best[destination.value] = kInfinity;
  heap.emplace(kInfinity, destination.value);
  while (!heap.empty() && pending > 0) {
    const auto [width, v] = heap.top();
    heap.pop();
    if (settled[v] || width != best[v]) continue;
    settled[v] = 1;
    if (wanted[v]) --pending;
    // Expanding v makes it a relay for its predecessors, and end users never relay.
    if (v != destination.value && net.role(NodeId{v}) == NodeRole::EndUser) continue;
    for (const auto& inc : net.incident(NodeId{v})) {
      const auto u = inc.neighbor.value;
      if (settled[u]) continue;
      const Channel& ch = net.channel(inc.channel);
      if (!view.allows(ch, inc.neighbor)) continue;
      const double w = std::min(width, ch.balance_from(inc.neighbor));
      if (w > best[u]) {
        best[u] = w;
        heap.emplace(w, u);
      }
    }
  }

  std::vector<double> out;
  out.reserve(sources.size());
  for (const auto s : sources) out.push_back(std::max(best[s.value], 0.0));
  return out;
}

double max_flow(const Network& net, NodeId source, NodeId destination) {
  const NodeId sources[] = {source};
  return multi_source_max_flow(net, sources, destination);
}

namespace {

double run_flow(const Network& net, std::span<const NodeId> sources, NodeId destination,
                std::span<const double> source_limits, double stop_at) {
  if (!net.contains(destination)) throw std::out_of_range("unknown node");
  if (!source_limits.empty() && source_limits.size() != sources.size()) {
    throw std::invalid_argument("source_limits must parallel sources");
  }
  if (sources.empty()) return 0.0;

  std::vector<char> terminal(net.node_count(), 0);
  terminal[destination.value] = 1;
  for (const auto s : sources) {
    if (!net.contains(s)) throw std::out_of_range("unknown node");
    if (s == destination) throw std::invalid_argument("destination listed as a source");
    terminal[s.value] = 1;
  }

  const auto super_source = static_cast<std::uint32_t>(net.node_count());
  ResidualGraph graph(net.node_count() + 1);
  load_channels(net, graph, terminal);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const double limit = source_limits.empty() ? kInfinity : source_limits[i];
    graph.add_pair(super_source, sources[i].value, limit, 0.0);
  }
  return graph.edmonds_karp(super_source, destination.value, stop_at);
}

}  // namespace

double multi_source_max_flow(const Network& net, std::span<const NodeId> sources, NodeId destination,
                             std::span<const double> source_limits) {
  return run_flow(net, sources, destination, source_limits, kInfinity);
}

bool flow_reaches(const Network& net, std::span<const NodeId> sources, NodeId destination, double amount,
                  std::span<const double> source_limits) {
  return run_flow(net, sources, destination, source_limits, amount) >= amount;
}

double route_fee(const Path& path, double amount, double fee_rate) {
  if (!(amount > 0.0)) throw std::invalid_argument("fee amount must be positive");
  if (!(fee_rate >= 0.0)) throw std::invalid_argument("fee rate must be non-negative");
  return amount * fee_rate * static_cast<double>(path.hops());
}

}  // namespace pcn
