#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "edctr/deployment.hpp"
#include "edctr/energy.hpp"
#include "edctr/geometry.hpp"
#include "edctr/random.hpp"
#include "edctr/routing.hpp"

namespace edctr {

enum class Protocol { EDCTR, LEACH, LEACH_C };

std::string_view to_string(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view name) noexcept;

struct DelayParams {
  double per_hop_fixed = 1e-3;      // s
  double propagation_speed = 2e8;   // m/s
  /// Channel bit rate used for per-sender serialization delay in the engine;
  /// 0 disables the queueing term.
  double bit_rate = 250e3;          // bit/s

  void validate() const;
  friend bool operator==(const DelayParams&, const DelayParams&) = default;
};

/// Latency along the positions of a path: each hop costs the fixed per-hop
/// delay plus its length over the propagation speed. The engine adds each
/// sender's serialization time on top of this.
double compute_delay(std::span<const Point> path, const DelayParams& params) noexcept;

/// Either an explicit relay count or one derived from the relay proportion
/// formula.
struct RelaySetting {
  bool automatic = false;
  std::size_t count = 0;

  friend bool operator==(const RelaySetting&, const RelaySetting&) = default;
};

struct SimConfig {
  Protocol protocol = Protocol::EDCTR;
  std::size_t node_count = 41;
  RelaySetting relays{};
  /// Used when the formula yields a negative or singular proportion.
  std::size_t relay_fallback = 0;
  RelayProportionInputs relay_formula{};
  ProportionVariant relay_formula_variant = ProportionVariant::Literal;
  double field_side = 100.0;
  Round rounds = 2000;
  std::uint64_t seed = 1;
  RadioParams radio{};
  PacketSpec packet{};
  DelayParams delay{};
  /// Desired cluster-head fraction of the baseline protocols.
  double leach_p = 0.05;
  double sensor_energy = 0.5;
  double relay_energy = 2.0;
  double round_duration = 1.0;
  /// Independent per-transmission drop probability.
  double loss_probability = 0.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Relays deployed for this config; always 0 for the baselines.
  std::size_t resolved_relay_count() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct RoundMetrics {
  Round round = 0;
  std::size_t alive = 0;  // sensors alive at round end
  std::size_t alive_relays = 0;
  std::size_t cluster_heads = 0;
  /// Energy debited from the sensors of each region.
  std::array<double, 3> energy_consumed_by_region{};
  /// Energy debited from relays (they sit in the inner square but are kept
  /// out of the per-region sensor figures).
  double relay_energy_consumed = 0.0;
  std::size_t packets_offered = 0;
  std::size_t packets_delivered = 0;
  std::size_t packets_lost = 0;
  double mean_delay = 0.0;    // s, over delivered packets; 0 when none
  double mean_hops = 0.0;     // over delivered packets; 0 when none
  double throughput = 0.0;    // delivered bits per second
  double total_debit = 0.0;   // J
  double residual_energy = 0.0;  // sensors and relays after the round, J

  double sensor_energy_consumed() const noexcept {
    return energy_consumed_by_region[0] + energy_consumed_by_region[1] + energy_consumed_by_region[2];
  }
  /// Sensors plus relays; equals total_debit.
  double energy_consumed() const noexcept { return sensor_energy_consumed() + relay_energy_consumed; }
  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

struct SummaryStats {
  std::optional<Round> first_node_death;
  std::optional<Round> last_node_death;
  std::array<std::optional<Round>, 3> first_death_by_region{};
  Round rounds_run = 0;
  std::size_t relay_count = 0;
  std::size_t packets_offered = 0;
  std::size_t packets_delivered = 0;
  std::size_t packets_lost = 0;
  double energy_consumed = 0.0;
  /// Packet-weighted over the whole run.
  double mean_delay = 0.0;

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

/// One protocol instance over a deployed network. Strictly sequential; each
/// call to run_round advances one round.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);

  const SimConfig& config() const noexcept { return cfg_; }
  const FieldPartition& field() const noexcept { return field_; }
  std::span<const Node> nodes() const noexcept { return nodes_; }
  const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
  /// Routes and heads of the most recent round.
  const RoutingTable& routes() const noexcept { return routes_; }
  const std::vector<NodeId>& heads() const noexcept { return heads_; }
  NodeId base_station() const noexcept { return base_station_; }
  std::size_t relay_count() const noexcept { return relay_count_; }

  Round next_round() const noexcept { return round_ + 1; }
  bool network_alive() const noexcept;
  double residual_energy() const noexcept;

  /// Election, routing, data generation and forwarding, energy debits, and
  /// metric collection for one round. Throws SimulationComplete when every
  /// sensor is dead.
  RoundMetrics run_round();

 private:
  struct Carried {
    NodeId source;
    std::vector<NodeId> path;
    double queueing = 0.0;  // accumulated serialization delay, s
  };
  struct Frame {
    std::vector<Carried> payload;
    bool aggregated = false;
  };
  struct Ledger;

  void elect_static_heads(Round round);
  void elect_leach_heads(Round round, std::vector<HeadAssignment>& out, std::vector<NodeId>& direct);
  void elect_leach_c_heads(Ledger& ledger, std::vector<HeadAssignment>& out, std::vector<NodeId>& direct);
  void assign_members(std::vector<HeadAssignment>& clusters, std::vector<NodeId>& direct) const;
  void control_phase(Ledger& ledger, bool join_requests);
  void data_phase(Ledger& ledger, RoundMetrics& m);

  SimConfig cfg_;
  FieldPartition field_;
  std::vector<Node> nodes_;
  std::vector<Cluster> clusters_;
  NodeId base_station_;
  std::size_t relay_count_ = 0;
  Round round_ = 0;

  RoutingTable routes_;
  std::vector<NodeId> heads_;
  /// Which heads aggregate this round (the inner head is idle while relays live).
  std::vector<bool> aggregating_;
  /// Member lists for this round's heads, used for control traffic.
  std::vector<HeadAssignment> round_clusters_;

  Rng election_rng_;
  Rng loss_rng_;
  /// LEACH: epoch in which each node last served as head.
  std::vector<std::optional<std::uint64_t>> last_head_epoch_;
};

struct SimulationResult {
  std::vector<RoundMetrics> rounds;
  SummaryStats summary;
};

using RoundObserver = std::function<void(const Simulation&, const RoundMetrics&)>;

/// Runs until cfg.rounds or until every sensor is dead. Deterministic for a
/// given config. Throws ConfigError for an invalid config.
SimulationResult run_simulation(const SimConfig& cfg, const RoundObserver& observer = {});

}  // namespace edctr
