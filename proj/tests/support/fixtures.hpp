#pragma once

#include <cstdint>
#include <vector>

#include "pcn/network.hpp"
#include "pcn/random.hpp"

namespace pcn::test {

/// Four-node fixture: g1<->r 40/60, g2<->r 10/90, r<->d 50/50, g2<->d 20/30
/// (first number is the left-to-right balance).
struct FixtureF1 {
  Network net;
  NodeId g1;
  NodeId g2;
  NodeId r;
  NodeId d;
};

inline FixtureF1 make_f1() {
  FixtureF1 f;
  f.g1 = f.net.add_node(NodeRole::Gateway);
  f.g2 = f.net.add_node(NodeRole::Gateway);
  f.r = f.net.add_node(NodeRole::Router);
  f.d = f.net.add_node(NodeRole::Router);
  f.net.add_channel(f.g1, f.r, 40, 60);
  f.net.add_channel(f.g2, f.r, 10, 90);
  f.net.add_channel(f.r, f.d, 50, 50);
  f.net.add_channel(f.g2, f.d, 20, 30);
  return f;
}

/// Random network on 2..max_nodes nodes with integer balances in
/// [0, max_balance] (capacity kept positive). The first `gateways` nodes (or
/// half, rounded up, when 0) are gateways, the rest routers.
inline Network random_small_network(Rng& rng, int max_nodes = 8, int max_balance = 20, double density = 0.5) {
  Network net;
  const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_nodes - 1)));
  for (int i = 0; i < n; ++i) net.add_node(i < (n + 1) / 2 ? NodeRole::Gateway : NodeRole::Router);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.uniform01() >= density) continue;
      auto ab = static_cast<double>(rng.below(static_cast<std::uint64_t>(max_balance + 1)));
      auto ba = static_cast<double>(rng.below(static_cast<std::uint64_t>(max_balance + 1)));
      if (ab + ba == 0.0) ab = 1.0;
      net.add_channel(NodeId{static_cast<std::uint32_t>(u)}, NodeId{static_cast<std::uint32_t>(v)}, ab, ba);
    }
  }
  return net;
}

}  // namespace pcn::test
