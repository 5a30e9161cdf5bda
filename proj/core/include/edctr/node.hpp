#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

#include "edctr/geometry.hpp"

namespace edctr {

/// Dense node ordinal. Nodes of one simulation are stored in a vector indexed
/// by this value.
struct NodeId {
  std::uint32_t value = 0;

  constexpr std::size_t index() const noexcept { return value; }
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

enum class NodeKind { Sensor, Relay, BaseStation };

std::string_view to_string(NodeKind kind) noexcept;

struct Node {
  NodeId id;
  Point pos;
  NodeKind kind = NodeKind::Sensor;
  double energy = 0.0;
  double initial_energy = 0.0;
  bool alive = true;
  Region region = Region::Inner;
  /// Owning segment for sensors; relays and the base station carry the index
  /// of the segment under their position as well.
  std::size_t segment = 0;

  bool is_base_station() const noexcept { return kind == NodeKind::BaseStation; }
  /// Alive and holding energy; the base station always qualifies.
  bool can_act() const noexcept { return is_base_station() || (alive && energy > 0.0); }
};

}  // namespace edctr

template <>
struct std::hash<edctr::NodeId> {
  std::size_t operator()(edctr::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
