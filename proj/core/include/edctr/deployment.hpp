#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "edctr/geometry.hpp"
#include "edctr/node.hpp"

namespace edctr {

using Round = std::uint32_t;

/// Sensors with ids 0..count-1 followed by the base station (id == count) at
/// the field center. Every segment receives floor(count/segments) or
/// ceil(count/segments) sensors, placed uniformly inside the segment.
/// Throws UnderPopulation when count is smaller than the segment count.
std::vector<Node> deploy_nodes(std::size_t count, const FieldPartition& fp, std::uint64_t seed,
                               double sensor_energy);

/// `count` relays uniformly placed strictly inside the inner square, with ids
/// starting at `first_id`.
std::vector<Node> place_relays(std::size_t count, const FieldPartition& fp, std::uint64_t seed,
                               double relay_energy, NodeId first_id);

/// Static cluster bound to one segment. Membership is fixed at construction;
/// only the head changes.
class Cluster {
 public:
  Cluster(Segment segment, std::vector<NodeId> members);

  const Segment& segment() const noexcept { return segment_; }
  std::span<const NodeId> members() const noexcept { return members_; }
  bool contains(NodeId id) const noexcept;

  std::optional<NodeId> head() const noexcept { return head_; }
  const std::vector<std::pair<Round, NodeId>>& head_history() const noexcept { return history_; }

  /// Records `id` as head for `round`. Rounds must strictly increase and `id`
  /// must be a member.
  void assign_head(Round round, NodeId id);
  /// Clears the head when no member is left alive.
  void clear_head() noexcept { head_.reset(); }

  bool any_alive(std::span<const Node> nodes) const noexcept;

 private:
  Segment segment_;
  std::vector<NodeId> members_;
  std::optional<NodeId> head_;
  std::vector<std::pair<Round, NodeId>> history_;
};

/// One cluster per segment holding the sensors the segment owns.
/// Throws UnderPopulation if a segment has no sensor.
std::vector<Cluster> form_static_clusters(std::span<const Node> nodes, const FieldPartition& fp);

/// Alive member closest to the segment midpoint, lowest id on ties.
/// Throws DeadCluster when no member is alive.
NodeId elect_initial_ch(const Cluster& cluster, std::span<const Node> nodes);

/// Alive member with the most residual energy, lowest id on ties; the choice
/// is recorded in the cluster's head history. Throws DeadCluster when no
/// member is alive.
NodeId rotate_ch(Cluster& cluster, std::span<const Node> nodes, Round round);

/// Inputs to the relay proportion formula. Field names follow the symbol
/// meanings: sensor/relay count weights, relay/sensor node energy, the
/// future-node allowance, and per-round relay/sensor consumption.
struct RelayProportionInputs {
  double a = 1.0;
  double b = 1.0;
  double m = 2.0;
  double m0 = 0.5;
  double u = 1.0;
  double e_relay = 1.0;
  double e_sensor = 1.0;

  friend bool operator==(const RelayProportionInputs&, const RelayProportionInputs&) = default;
};

/// How to read the bare "0" in the denominator's (0 - (a+b) + m(u-b)) term.
enum class ProportionVariant {
  Literal,       // the constant zero as printed
  SubstituteM0,  // sensor node energy m0
};

/// P_opt = ((1+b) e_relay) / ((1+m) (a+m) (z - (a+b) + m(-b+u)) e_sensor),
/// z being 0 or m0 depending on `variant`. Negative results are returned
/// as-is. Throws SingularFormula for a zero denominator.
double relay_proportion(const RelayProportionInputs& in, ProportionVariant variant = ProportionVariant::Literal);

/// round(p_opt * sensor_count) clamped to [0, sensor_count]. A missing,
/// negative or non-finite proportion yields `fallback`.
std::size_t relay_count(std::optional<double> p_opt, std::size_t sensor_count, std::size_t fallback = 0);

}  // namespace edctr
