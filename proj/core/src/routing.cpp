#include "edctr/routing.hpp"

#include <algorithm>
#include <set>

namespace edctr {

std::optional<NodeId> RoutingTable::next(NodeId id) const {
  if (auto it = next_hop.find(id); it != next_hop.end()) return it->second;
  return std::nullopt;
}

std::optional<std::uint32_t> RoutingTable::hops(NodeId id) const {
  if (auto it = hop_counts.find(id); it != hop_counts.end()) return it->second;
  return std::nullopt;
}

void RoutingTable::compute_hop_counts() {
  hop_counts.clear();
  const std::size_t limit = next_hop.size() + 1;
  for (const auto& [from, to] : next_hop) {
    std::uint32_t count = 1;
    NodeId at = to;
    bool reached = at == base_station;
    while (!reached && count <= limit) {
      auto step = next(at);
      if (!step) break;
      at = *step;
      ++count;
      reached = at == base_station;
    }
    if (reached) hop_counts[from] = count;
  }
}

std::optional<NodeId> nearest_alive(Point from, std::span<const NodeId> candidates, std::span<const Node> nodes) {
  std::optional<NodeId> best;
  double best_distance = 0.0;
  for (NodeId id : candidates) {
    const Node& n = nodes[id.index()];
    if (!n.can_act()) continue;
    const double d = distance(from, n.pos);
    if (!best || d < best_distance || (d == best_distance && id < *best)) {
      best = id;
      best_distance = d;
    }
  }
  return best;
}

RoutingTable build_routes(std::span<const Cluster> clusters, std::span<const Node> nodes, NodeId base_station) {
  RoutingTable table;
  table.base_station = base_station;

  std::vector<NodeId> relays;
  for (const Node& n : nodes) {
    if (n.kind == NodeKind::Relay && n.can_act()) relays.push_back(n.id);
  }

  std::vector<NodeId> inner_heads;
  std::vector<NodeId> middle_heads;
  for (const Cluster& c : clusters) {
    if (!c.head() || !nodes[c.head()->index()].can_act()) continue;
    if (c.segment().region == Region::Inner) inner_heads.push_back(*c.head());
    if (c.segment().region == Region::Middle) middle_heads.push_back(*c.head());
  }
  std::sort(inner_heads.begin(), inner_heads.end());
  std::sort(middle_heads.begin(), middle_heads.end());

  for (NodeId r : relays) table.link(r, base_station);

  for (const Cluster& c : clusters) {
    const auto head = c.head();
    if (!head || !nodes[head->index()].can_act()) continue;
    const Point head_pos = nodes[head->index()].pos;

    if (c.segment().region == Region::Inner && !relays.empty()) {
      for (NodeId m : c.members()) {
        if (nodes[m.index()].can_act()) table.link(m, base_station);
      }
      continue;
    }

    for (NodeId m : c.members()) {
      if (m != *head && nodes[m.index()].can_act()) table.link(m, *head);
    }

    switch (c.segment().region) {
      case Region::Inner:
        table.link(*head, base_station);
        break;
      case Region::Middle:
        if (auto r = nearest_alive(head_pos, relays, nodes)) {
          table.link(*head, *r);
        } else if (auto ih = nearest_alive(head_pos, inner_heads, nodes)) {
          table.link(*head, *ih);
        } else {
          table.link(*head, base_station);
        }
        break;
      case Region::Outer:
        if (auto mh = nearest_alive(head_pos, middle_heads, nodes)) table.link(*head, *mh);
        break;
    }
  }

  table.compute_hop_counts();
  return table;
}

RoutingTable build_routes_leach(std::span<const HeadAssignment> clusters, std::span<const NodeId> direct,
                                NodeId base_station) {
  RoutingTable table;
  table.base_station = base_station;
  for (const HeadAssignment& c : clusters) {
    table.link(c.head, base_station);
    for (NodeId m : c.members) {
      if (m != c.head) table.link(m, c.head);
    }
  }
  for (NodeId id : direct) table.link(id, base_station);
  table.compute_hop_counts();
  return table;
}

RoutePath route_hops(const RoutingTable& table, NodeId source, std::span<const Node> nodes) {
  RoutePath path;
  std::set<NodeId> seen;
  NodeId at = source;
  for (;;) {
    if (at == table.base_station) {
      path.hops.push_back(at);
      path.complete = true;
      return path;
    }
    if (!nodes[at.index()].can_act() || !seen.insert(at).second) return path;
    path.hops.push_back(at);
    auto step = table.next(at);
    if (!step) return path;
    at = *step;
  }
}

bool is_forest(const RoutingTable& table) {
  for (const auto& [from, to] : table.next_hop) {
    std::set<NodeId> seen{from};
    NodeId at = to;
    while (at != table.base_station) {
      if (!seen.insert(at).second) return false;
      auto step = table.next(at);
      if (!step) break;
      at = *step;
    }
  }
  return true;
}

}  // namespace edctr
