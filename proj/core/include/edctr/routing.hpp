#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "edctr/deployment.hpp"
#include "edctr/node.hpp"

namespace edctr {

/// Next-hop assignments for one round. A node without an entry has no route
/// this round; its packets are lost.
struct RoutingTable {
  NodeId base_station;
  std::map<NodeId, NodeId> next_hop;
  /// Hops to the base station, present only for nodes whose chain reaches it.
  std::map<NodeId, std::uint32_t> hop_counts;

  std::optional<NodeId> next(NodeId id) const;
  std::optional<std::uint32_t> hops(NodeId id) const;
  void link(NodeId from, NodeId to) { next_hop[from] = to; }
  /// Fills hop_counts by walking every chain.
  void compute_hop_counts();
};

struct RoutePath {
  std::vector<NodeId> hops;  // starts at the source
  bool complete = false;     // ends at the base station
};

/// Inner-ward multi-hop routes for the static-cluster protocol.
///
/// Members send to their cluster head. Outer heads forward to the nearest
/// alive middle head. Middle heads forward to the nearest alive relay, else
/// to the inner head, else straight to the base station. Relays and the
/// inner head send to the base station. While any relay is alive the inner
/// cluster has no head role and its sensors transmit directly to the base
/// station. Clusters must carry their current head (if any). Ties go to the
/// lowest id.
RoutingTable build_routes(std::span<const Cluster> clusters, std::span<const Node> nodes, NodeId base_station);

/// A per-round cluster of the baseline protocols.
struct HeadAssignment {
  NodeId head;
  std::vector<NodeId> members;
};

/// Members send to their head, heads send straight to the base station, and
/// `direct` nodes (no head reachable) transmit to the base station themselves.
RoutingTable build_routes_leach(std::span<const HeadAssignment> clusters, std::span<const NodeId> direct,
                                NodeId base_station);

/// Follows next hops from `source`. Stops early (complete == false) on a
/// missing entry, a node that can no longer act, or a cycle.
RoutePath route_hops(const RoutingTable& table, NodeId source, std::span<const Node> nodes);

/// True when no chain revisits a node. Chains end at the base station or at
/// a node without a route.
bool is_forest(const RoutingTable& table);

/// Alive candidate nearest to `from`, lowest id on ties.
std::optional<NodeId> nearest_alive(Point from, std::span<const NodeId> candidates, std::span<const Node> nodes);

}  // namespace edctr
