#include "edctr/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "edctr/error.hpp"
#include "edctr/random.hpp"

namespace edctr {

namespace {

Point sample_in_segment(Rng& rng, const FieldPartition& fp, std::size_t segment) {
  const Rect& r = fp.segments()[segment].bounds;
  for (;;) {
    const Point p{rng.uniform(r.min.x, r.max.x), rng.uniform(r.min.y, r.max.y)};
    if (fp.segment_index_of(p) == segment) return p;
  }
}

// Fisher-Yates with our own bounded draw; std::shuffle is not portable
// across standard libraries.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

void require_energy(double e, const char* field) {
  if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError(field, "initial energy must be positive");
}

}  // namespace

std::vector<Node> deploy_nodes(std::size_t count, const FieldPartition& fp, std::uint64_t seed,
                               double sensor_energy) {
  require_energy(sensor_energy, "sensor_energy");
  const std::size_t segments = fp.segments().size();
  if (count < segments) {
    throw Error(ErrorCategory::UnderPopulation, "need at least " + std::to_string(segments) +
                                                    " sensors (one per segment), got " + std::to_string(count));
  }

  Rng rng(seed, Rng::kSensorDeployment);

  // Segments receiving the remainder are drawn at random.
  std::vector<std::size_t> order(segments);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  std::vector<std::size_t> quota(segments, count / segments);
  for (std::size_t k = 0; k < count % segments; ++k) ++quota[order[k]];

  std::vector<Node> nodes;
  nodes.reserve(count + 1);
  for (std::size_t s = 0; s < segments; ++s) {
    for (std::size_t k = 0; k < quota[s]; ++k) {
      const Point p = sample_in_segment(rng, fp, s);
      nodes.push_back(Node{
          .id = NodeId{static_cast<std::uint32_t>(nodes.size())},
          .pos = p,
          .kind = NodeKind::Sensor,
          .energy = sensor_energy,
          .initial_energy = sensor_energy,
          .alive = true,
          .region = fp.segments()[s].region,
          .segment = s,
      });
    }
  }
  nodes.push_back(Node{
      .id = NodeId{static_cast<std::uint32_t>(count)},
      .pos = fp.center(),
      .kind = NodeKind::BaseStation,
      .energy = 0.0,
      .initial_energy = 0.0,
      .alive = true,
      .region = Region::Inner,
      .segment = 0,
  });
  return nodes;
}

std::vector<Node> place_relays(std::size_t count, const FieldPartition& fp, std::uint64_t seed,
                               double relay_energy, NodeId first_id) {
  std::vector<Node> relays;
  if (count == 0) return relays;
  require_energy(relay_energy, "relay_energy");

  Rng rng(seed, Rng::kRelayPlacement);
  const Point c = fp.center();
  const double d = fp.reference_distance();
  relays.reserve(count);
  while (relays.size() < count) {
    const Point p{rng.uniform(c.x - d, c.x + d), rng.uniform(c.y - d, c.y + d)};
    if (chebyshev_distance(p, c) >= d) continue;
    relays.push_back(Node{
        .id = NodeId{first_id.value + static_cast<std::uint32_t>(relays.size())},
        .pos = p,
        .kind = NodeKind::Relay,
        .energy = relay_energy,
        .initial_energy = relay_energy,
        .alive = true,
        .region = Region::Inner,
        .segment = 0,
    });
  }
  return relays;
}

Cluster::Cluster(Segment segment, std::vector<NodeId> members)
    : segment_(std::move(segment)), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool Cluster::contains(NodeId id) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), id);
}

void Cluster::assign_head(Round round, NodeId id) {
  if (!contains(id)) {
    throw std::invalid_argument("node " + std::to_string(id.value) + " is not a member of segment " +
                                std::to_string(segment_.index));
  }
  if (!history_.empty() && history_.back().first >= round) {
    throw std::invalid_argument("head history rounds must strictly increase");
  }
  head_ = id;
  history_.emplace_back(round, id);
}

bool Cluster::any_alive(std::span<const Node> nodes) const noexcept {
  return std::any_of(members_.begin(), members_.end(), [&](NodeId id) { return nodes[id.index()].can_act(); });
}

std::vector<Cluster> form_static_clusters(std::span<const Node> nodes, const FieldPartition& fp) {
  std::vector<std::vector<NodeId>> members(fp.segments().size());
  for (const Node& n : nodes) {
    if (n.kind != NodeKind::Sensor) continue;
    members[fp.segment_index_of(n.pos)].push_back(n.id);
  }
  std::vector<Cluster> clusters;
  clusters.reserve(members.size());
  for (std::size_t s = 0; s < members.size(); ++s) {
    if (members[s].empty()) {
      throw Error(ErrorCategory::UnderPopulation, "segment " + std::to_string(s) + " has no sensor nodes");
    }
    clusters.emplace_back(fp.segments()[s], std::move(members[s]));
  }
  return clusters;
}

namespace {

[[noreturn]] void throw_dead(const Cluster& c) {
  throw Error(ErrorCategory::DeadCluster, "cluster of segment " + std::to_string(c.segment().index) +
                                              " has no alive members");
}

}  // namespace

NodeId elect_initial_ch(const Cluster& cluster, std::span<const Node> nodes) {
  std::optional<NodeId> best;
  double best_distance = 0.0;
  for (NodeId id : cluster.members()) {  // ascending ids: strict < keeps the lowest on ties
    const Node& n = nodes[id.index()];
    if (!n.can_act()) continue;
    const double dist = distance(n.pos, cluster.segment().midpoint);
    if (!best || dist < best_distance) {
      best = id;
      best_distance = dist;
    }
  }
  if (!best) throw_dead(cluster);
  return *best;
}

NodeId rotate_ch(Cluster& cluster, std::span<const Node> nodes, Round round) {
  std::optional<NodeId> best;
  double best_energy = 0.0;
  for (NodeId id : cluster.members()) {
    const Node& n = nodes[id.index()];
    if (!n.can_act()) continue;
    if (!best || n.energy > best_energy) {
      best = id;
      best_energy = n.energy;
    }
  }
  if (!best) throw_dead(cluster);
  cluster.assign_head(round, *best);
  return *best;
}

double relay_proportion(const RelayProportionInputs& in, ProportionVariant variant) {
  const double zero_term = variant == ProportionVariant::Literal ? 0.0 : in.m0;
  const double numerator = (1.0 + in.b) * in.e_relay;
  const double denominator =
      (1.0 + in.m) * (in.a + in.m) * (zero_term - (in.a + in.b) + in.m * (-in.b + in.u)) * in.e_sensor;
  if (denominator == 0.0) {
    throw Error(ErrorCategory::SingularFormula, "relay proportion denominator is zero");
  }
  return numerator / denominator;
}

std::size_t relay_count(std::optional<double> p_opt, std::size_t sensor_count, std::size_t fallback) {
  if (!p_opt || !std::isfinite(*p_opt) || *p_opt < 0.0) return fallback;
  const double scaled = std::round(*p_opt * static_cast<double>(sensor_count));
  if (scaled >= static_cast<double>(sensor_count)) return sensor_count;
  return static_cast<std::size_t>(scaled);
}

}  // namespace edctr
