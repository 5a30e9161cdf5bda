#include "edctr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "edctr/error.hpp"

namespace edctr {

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::EDCTR: return "EDCTR";
    case Protocol::LEACH: return "LEACH";
    case Protocol::LEACH_C: return "LEACH_C";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) noexcept {
  if (name == "EDCTR") return Protocol::EDCTR;
  if (name == "LEACH") return Protocol::LEACH;
  if (name == "LEACH_C" || name == "LEACH-C") return Protocol::LEACH_C;
  return std::nullopt;
}

void DelayParams::validate() const {
  if (!(per_hop_fixed > 0.0) || !std::isfinite(per_hop_fixed)) {
    throw ConfigError("delay.per_hop_fixed", "must be positive");
  }
  if (!(propagation_speed > 0.0) || !std::isfinite(propagation_speed)) {
    throw ConfigError("delay.propagation_speed", "must be positive");
  }
  if (!(bit_rate >= 0.0) || !std::isfinite(bit_rate)) {
    throw ConfigError("delay.bit_rate", "must be non-negative (0 disables serialization delay)");
  }
}

double compute_delay(std::span<const Point> path, const DelayParams& params) noexcept {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += params.per_hop_fixed + distance(path[i - 1], path[i]) / params.propagation_speed;
  }
  return total;
}

void SimConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (node_count < 9) throw ConfigError("node_count", "must be at least 9 (one sensor per segment)");
  if (rounds < 1) throw ConfigError("rounds", "must be at least 1");
  if (!positive(field_side)) throw ConfigError("field_side", "must be positive");
  if (!positive(leach_p) || leach_p > 1.0) throw ConfigError("leach_p", "must lie in (0, 1]");
  if (!positive(sensor_energy)) throw ConfigError("sensor_energy", "must be positive");
  if (!positive(relay_energy)) throw ConfigError("relay_energy", "must be positive");
  if (relay_energy < sensor_energy) throw ConfigError("relay_energy", "must be at least sensor_energy");
  if (!positive(round_duration)) throw ConfigError("round_duration", "must be positive");
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) {
    throw ConfigError("loss_probability", "must lie in [0, 1]");
  }
  const RelayProportionInputs& f = relay_formula;
  for (double v : {f.a, f.b, f.m, f.m0, f.u, f.e_relay, f.e_sensor}) {
    if (!std::isfinite(v)) throw ConfigError("relay_formula", "all inputs must be finite");
  }
  radio.validate();
  packet.validate();
  delay.validate();
}

std::size_t SimConfig::resolved_relay_count() const {
  if (protocol != Protocol::EDCTR) return 0;
  if (!relays.automatic) return relays.count;
  std::optional<double> p;
  try {
    p = relay_proportion(relay_formula, relay_formula_variant);
  } catch (const Error& e) {
    if (e.category() != ErrorCategory::SingularFormula) throw;
  }
  return relay_count(p, node_count, relay_fallback);
}

struct Simulation::Ledger {
  std::vector<Node>& nodes;
  RoundMetrics& metrics;

  /// True when the node could act and paid the full amount.
  bool debit(NodeId id, double amount) {
    Node& n = nodes[id.index()];
    if (!n.can_act()) return false;
    if (n.is_base_station()) return true;
    const double taken = consume(n, amount);
    if (n.kind == NodeKind::Relay) {
      metrics.relay_energy_consumed += taken;
    } else {
      metrics.energy_consumed_by_region[region_index(n.region)] += taken;
    }
    metrics.total_debit += taken;
    return taken == amount;
  }
};

namespace {

SimConfig validated(SimConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulation::Simulation(SimConfig cfg)
    : cfg_(validated(std::move(cfg))),
      field_(FieldPartition::equal_rings(cfg_.field_side)),
      election_rng_(cfg_.seed, Rng::kClusterHeadElection),
      loss_rng_(cfg_.seed, Rng::kChannelLoss) {
  nodes_ = deploy_nodes(cfg_.node_count, field_, cfg_.seed, cfg_.sensor_energy);
  base_station_ = nodes_.back().id;
  relay_count_ = cfg_.resolved_relay_count();
  auto relays = place_relays(relay_count_, field_, cfg_.seed, cfg_.relay_energy,
                             NodeId{base_station_.value + 1});
  nodes_.insert(nodes_.end(), relays.begin(), relays.end());
  if (cfg_.protocol == Protocol::EDCTR) clusters_ = form_static_clusters(nodes_, field_);
  last_head_epoch_.resize(nodes_.size());
}

bool Simulation::network_alive() const noexcept {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.kind == NodeKind::Sensor && n.can_act(); });
}

double Simulation::residual_energy() const noexcept {
  double total = 0.0;
  for (const Node& n : nodes_) {
    if (!n.is_base_station()) total += n.energy;
  }
  return total;
}

void Simulation::elect_static_heads(Round round) {
  for (Cluster& c : clusters_) {
    if (!c.any_alive(nodes_)) {
      c.clear_head();
      continue;
    }
    if (round == 1) {
      c.assign_head(round, elect_initial_ch(c, nodes_));
    } else {
      rotate_ch(c, nodes_, round);
    }
  }
}

void Simulation::elect_leach_heads(Round round, std::vector<HeadAssignment>& out, std::vector<NodeId>& direct) {
  const double p = cfg_.leach_p;
  const auto epoch_len = static_cast<std::uint64_t>(std::max(1.0, std::round(1.0 / p)));
  const std::uint64_t epoch = (round - 1) / epoch_len;
  const std::uint64_t position = (round - 1) % epoch_len;
  // The last round of an epoch elects every remaining eligible node.
  const double threshold = position + 1 == epoch_len ? 1.0 : p / (1.0 - p * static_cast<double>(position));

  for (const Node& n : nodes_) {
    if (n.kind != NodeKind::Sensor || !n.can_act()) continue;
    const double draw = election_rng_.uniform();
    const bool eligible = last_head_epoch_[n.id.index()] != epoch;
    if (eligible && draw < threshold) {
      last_head_epoch_[n.id.index()] = epoch;
      out.push_back(HeadAssignment{n.id, {}});
    }
  }
  assign_members(out, direct);
}

void Simulation::elect_leach_c_heads(Ledger& ledger, std::vector<HeadAssignment>& out,
                                     std::vector<NodeId>& direct) {
  // Every node reports its state to the base station, which picks the k
  // most charged nodes.
  const Point bs = nodes_[base_station_.index()].pos;
  std::vector<NodeId> alive;
  for (const Node& n : nodes_) {
    if (n.kind != NodeKind::Sensor || !n.can_act()) continue;
    ledger.debit(n.id, tx_energy(cfg_.packet.control_bits, distance(n.pos, bs), cfg_.radio));
    if (n.can_act()) alive.push_back(n.id);
  }
  if (alive.empty()) return;
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg_.leach_p * static_cast<double>(alive.size()))), 1, alive.size());
  std::stable_sort(alive.begin(), alive.end(), [&](NodeId a, NodeId b) {
    return nodes_[a.index()].energy > nodes_[b.index()].energy;
  });
  alive.resize(k);
  std::sort(alive.begin(), alive.end());
  for (NodeId id : alive) out.push_back(HeadAssignment{id, {}});
  assign_members(out, direct);
}

void Simulation::assign_members(std::vector<HeadAssignment>& clusters, std::vector<NodeId>& direct) const {
  std::vector<NodeId> heads;
  heads.reserve(clusters.size());
  for (const auto& c : clusters) heads.push_back(c.head);
  for (const Node& n : nodes_) {
    if (n.kind != NodeKind::Sensor || !n.can_act()) continue;
    if (std::binary_search(heads.begin(), heads.end(), n.id)) continue;
    if (auto h = nearest_alive(n.pos, heads, nodes_)) {
      auto it = std::lower_bound(heads.begin(), heads.end(), *h);
      clusters[static_cast<std::size_t>(it - heads.begin())].members.push_back(n.id);
    } else {
      direct.push_back(n.id);
    }
  }
}

void Simulation::control_phase(Ledger& ledger, bool join_requests) {
  const auto bits = cfg_.packet.control_bits;
  for (const HeadAssignment& c : round_clusters_) {
    const Node& head = nodes_[c.head.index()];
    std::vector<NodeId> members;
    double radius = 0.0;
    for (NodeId m : c.members) {
      if (m == c.head || !nodes_[m.index()].can_act()) continue;
      members.push_back(m);
      radius = std::max(radius, distance(head.pos, nodes_[m.index()].pos));
    }
    if (members.empty()) continue;
    // Head advertisement.
    if (!ledger.debit(c.head, tx_energy(bits, radius, cfg_.radio))) continue;
    for (NodeId m : members) ledger.debit(m, rx_energy(bits, cfg_.radio));
    if (!join_requests) continue;
    for (NodeId m : members) {
      if (ledger.debit(m, tx_energy(bits, distance(nodes_[m.index()].pos, head.pos), cfg_.radio))) {
        ledger.debit(c.head, rx_energy(bits, cfg_.radio));
      }
    }
  }
}

void Simulation::data_phase(Ledger& ledger, RoundMetrics& m) {
  const auto bits = cfg_.packet.payload_bits;
  const double serialization = cfg_.delay.bit_rate > 0.0 ? static_cast<double>(bits) / cfg_.delay.bit_rate : 0.0;
  std::vector<std::vector<Frame>> inbox(nodes_.size());

  for (const Node& n : nodes_) {
    if (n.kind != NodeKind::Sensor || !n.can_act()) continue;
    ++m.packets_offered;
    inbox[n.id.index()].push_back(Frame{{Carried{n.id, {n.id}}}, false});
  }

  // Senders ordered so every receiver is handled after all of its senders.
  std::vector<std::pair<std::size_t, NodeId>> order;
  for (const auto& [from, to] : routes_.next_hop) {
    std::size_t depth = 1;
    NodeId at = to;
    while (at != base_station_) {
      auto step = routes_.next(at);
      if (!step) break;
      at = *step;
      ++depth;
    }
    order.emplace_back(depth, from);
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::size_t lost = 0;
  double delay_sum = 0.0;
  std::size_t hop_sum = 0;
  auto drop = [&lost](const Frame& f) { lost += f.payload.size(); };

  std::vector<Point> positions;
  for (const auto& [depth, id] : order) {
    std::vector<Frame> held = std::move(inbox[id.index()]);
    inbox[id.index()].clear();
    if (held.empty()) continue;
    if (!nodes_[id.index()].can_act()) {
      std::for_each(held.begin(), held.end(), drop);
      continue;
    }

    std::vector<Frame> outgoing;
    if (aggregating_[id.index()]) {
      Frame fused{{}, true};
      std::size_t inputs = 0;
      for (Frame& f : held) {
        if (f.aggregated) {
          outgoing.push_back(std::move(f));
        } else {
          ++inputs;
          for (Carried& c : f.payload) fused.payload.push_back(std::move(c));
        }
      }
      if (inputs > 0) {
        if (!ledger.debit(id, aggregate_energy(inputs, bits, cfg_.radio))) {
          drop(fused);
          std::for_each(outgoing.begin(), outgoing.end(), drop);
          continue;
        }
        outgoing.insert(outgoing.begin(), std::move(fused));
      }
    } else {
      outgoing = std::move(held);
    }

    const NodeId next = *routes_.next(id);
    const double hop = distance(nodes_[id.index()].pos, nodes_[next.index()].pos);
    for (std::size_t k = 0; k < outgoing.size(); ++k) {
      Frame& f = outgoing[k];
      if (!ledger.debit(id, tx_energy(bits, hop, cfg_.radio))) {
        for (std::size_t j = k; j < outgoing.size(); ++j) drop(outgoing[j]);
        break;
      }
      // The k-th frame leaves after the k frames queued ahead of it.
      const double wait = static_cast<double>(k + 1) * serialization;
      for (Carried& c : f.payload) c.queueing += wait;
      if (cfg_.loss_probability > 0.0 && loss_rng_.uniform() < cfg_.loss_probability) {
        drop(f);
        continue;
      }
      if (next != base_station_ && !ledger.debit(next, rx_energy(bits, cfg_.radio))) {
        drop(f);
        continue;
      }
      for (Carried& c : f.payload) c.path.push_back(next);
      if (next == base_station_) {
        for (const Carried& c : f.payload) {
          positions.clear();
          for (NodeId h : c.path) positions.push_back(nodes_[h.index()].pos);
          delay_sum += compute_delay(positions, cfg_.delay) + c.queueing;
          hop_sum += c.path.size() - 1;
          ++m.packets_delivered;
        }
      } else {
        inbox[next.index()].push_back(std::move(f));
      }
    }
  }

  // Anything still held sat on a node without a route.
  for (const auto& frames : inbox) std::for_each(frames.begin(), frames.end(), drop);

  m.packets_lost = lost;
  if (m.packets_delivered > 0) {
    m.mean_delay = delay_sum / static_cast<double>(m.packets_delivered);
    m.mean_hops = static_cast<double>(hop_sum) / static_cast<double>(m.packets_delivered);
  }
  m.throughput = static_cast<double>(m.packets_delivered) * static_cast<double>(bits) / cfg_.round_duration;
}

RoundMetrics Simulation::run_round() {
  if (!network_alive()) {
    throw Error(ErrorCategory::SimulationComplete, "all sensor nodes are dead");
  }
  ++round_;
  RoundMetrics m;
  m.round = round_;
  Ledger ledger{nodes_, m};

  heads_.clear();
  round_clusters_.clear();
  aggregating_.assign(nodes_.size(), false);

  switch (cfg_.protocol) {
    case Protocol::EDCTR: {
      elect_static_heads(round_);
      routes_ = build_routes(clusters_, nodes_, base_station_);
      const bool relays_alive = std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) {
        return n.kind == NodeKind::Relay && n.can_act();
      });
      for (const Cluster& c : clusters_) {
        if (!c.head()) continue;
        if (c.segment().region == Region::Inner && relays_alive) continue;
        HeadAssignment a{*c.head(), {}};
        for (NodeId id : c.members()) {
          if (id != a.head) a.members.push_back(id);
        }
        aggregating_[a.head.index()] = true;
        heads_.push_back(a.head);
        round_clusters_.push_back(std::move(a));
      }
      control_phase(ledger, false);
      break;
    }
    case Protocol::LEACH:
    case Protocol::LEACH_C: {
      std::vector<HeadAssignment> clusters;
      std::vector<NodeId> direct;
      if (cfg_.protocol == Protocol::LEACH) {
        elect_leach_heads(round_, clusters, direct);
      } else {
        elect_leach_c_heads(ledger, clusters, direct);
      }
      routes_ = build_routes_leach(clusters, direct, base_station_);
      for (const auto& c : clusters) {
        aggregating_[c.head.index()] = true;
        heads_.push_back(c.head);
      }
      round_clusters_ = std::move(clusters);
      control_phase(ledger, true);
      break;
    }
  }
  std::sort(heads_.begin(), heads_.end());
  m.cluster_heads = heads_.size();

  data_phase(ledger, m);

  for (const Node& n : nodes_) {
    if (n.kind == NodeKind::Sensor && n.alive) ++m.alive;
    if (n.kind == NodeKind::Relay && n.alive) ++m.alive_relays;
  }
  m.residual_energy = residual_energy();
  return m;
}

SimulationResult run_simulation(const SimConfig& cfg, const RoundObserver& observer) {
  Simulation sim(cfg);
  SimulationResult result;
  SummaryStats& s = result.summary;
  s.relay_count = sim.relay_count();

  auto alive_by_region = [&sim] {
    std::array<std::size_t, 3> counts{};
    for (const Node& n : sim.nodes()) {
      if (n.kind == NodeKind::Sensor && n.alive) ++counts[region_index(n.region)];
    }
    return counts;
  };
  auto previous = alive_by_region();
  const std::size_t sensors = std::accumulate(previous.begin(), previous.end(), std::size_t{0});

  double delay_weighted = 0.0;
  while (sim.next_round() <= cfg.rounds && sim.network_alive()) {
    RoundMetrics m = sim.run_round();
    const auto now = alive_by_region();
    for (std::size_t r = 0; r < 3; ++r) {
      if (now[r] < previous[r] && !s.first_death_by_region[r]) s.first_death_by_region[r] = m.round;
    }
    previous = now;
    if (m.alive < sensors && !s.first_node_death) s.first_node_death = m.round;
    if (m.alive == 0) s.last_node_death = m.round;

    s.packets_offered += m.packets_offered;
    s.packets_delivered += m.packets_delivered;
    s.packets_lost += m.packets_lost;
    s.energy_consumed += m.energy_consumed();
    delay_weighted += m.mean_delay * static_cast<double>(m.packets_delivered);
    s.rounds_run = m.round;
    if (observer) observer(sim, m);
    result.rounds.push_back(m);
  }
  if (s.packets_delivered > 0) s.mean_delay = delay_weighted / static_cast<double>(s.packets_delivered);
  return result;
}

}  // namespace edctr
