#include "edctr/report.hpp"

#include <array>
#include <ostream>

#include <fmt/format.h>

namespace edctr {

namespace {

constexpr std::array<const char*, 14> kMetricColumns{
    "alive",           "alive_relays",      "cluster_heads", "energy_inner_j", "energy_middle_j",
    "energy_outer_j",  "energy_relay_j",    "packets_offered", "packets_delivered", "packets_lost",
    "mean_delay_s",    "mean_hops",         "throughput_bps", "residual_energy_j",
};

nlohmann::json optional_round(const std::optional<Round>& r) {
  return r ? nlohmann::json(*r) : nlohmann::json(nullptr);
}

std::string_view to_string(RingSide side) {
  switch (side) {
    case RingSide::Whole: return "whole";
    case RingSide::Top: return "top";
    case RingSide::Right: return "right";
    case RingSide::Bottom: return "bottom";
    case RingSide::Left: return "left";
  }
  return "?";
}

nlohmann::json corners_json(const SquareCorners& s) {
  return {{"top_right", to_json(s.top_right)},
          {"bottom_right", to_json(s.bottom_right)},
          {"top_left", to_json(s.top_left)},
          {"bottom_left", to_json(s.bottom_left)}};
}

}  // namespace

std::span<const char* const> metric_columns() noexcept { return kMetricColumns; }

std::vector<double> metric_values(const RoundMetrics& m) {
  return {
      static_cast<double>(m.alive),
      static_cast<double>(m.alive_relays),
      static_cast<double>(m.cluster_heads),
      m.energy_consumed_by_region[0],
      m.energy_consumed_by_region[1],
      m.energy_consumed_by_region[2],
      m.relay_energy_consumed,
      static_cast<double>(m.packets_offered),
      static_cast<double>(m.packets_delivered),
      static_cast<double>(m.packets_lost),
      m.mean_delay,
      m.mean_hops,
      m.throughput,
      m.residual_energy,
  };
}

std::vector<RoundMetrics> pad_series(std::span<const RoundMetrics> series, Round horizon) {
  std::vector<RoundMetrics> out(series.begin(), series.end());
  if (out.size() > horizon) out.resize(horizon);
  while (out.size() < horizon) {
    RoundMetrics idle;
    idle.round = static_cast<Round>(out.size() + 1);
    if (!out.empty()) {
      idle.alive_relays = out.back().alive_relays;
      idle.residual_energy = out.back().residual_energy;
    }
    out.push_back(idle);
  }
  return out;
}

std::string format_number(double v) { return fmt::format("{}", v); }

void write_run_csv(std::ostream& out, std::span<const RoundMetrics> padded, double round_duration) {
  out << kRunCsvHeader << '\n';
  for (const RoundMetrics& m : padded) {
    out << m.round << ',' << format_number(m.round * round_duration);
    for (double v : metric_values(m)) out << ',' << format_number(v);
    out << '\n';
  }
}

nlohmann::json to_json(const Point& p) { return nlohmann::json::array({p.x, p.y}); }

nlohmann::json to_json(const SummaryStats& s) {
  return {
      {"first_node_death", optional_round(s.first_node_death)},
      {"last_node_death", optional_round(s.last_node_death)},
      {"first_death_by_region",
       {{"inner", optional_round(s.first_death_by_region[0])},
        {"middle", optional_round(s.first_death_by_region[1])},
        {"outer", optional_round(s.first_death_by_region[2])}}},
      {"rounds_run", s.rounds_run},
      {"relay_count", s.relay_count},
      {"packets_offered", s.packets_offered},
      {"packets_delivered", s.packets_delivered},
      {"packets_lost", s.packets_lost},
      {"energy_consumed_j", s.energy_consumed},
      {"mean_delay_s", s.mean_delay},
  };
}

nlohmann::json to_json(const RoundMetrics& m) {
  nlohmann::json j{{"round", m.round}};
  const auto values = metric_values(m);
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i) j[kMetricColumns[i]] = values[i];
  return j;
}

nlohmann::json topology_json(const Simulation& sim) {
  const FieldPartition& fp = sim.field();
  nlohmann::json field{
      {"center", to_json(fp.center())},
      {"distances", fp.distances()},
      {"field_side", fp.field_side()},
      {"squares", nlohmann::json::array()},
      {"segments", nlohmann::json::array()},
  };
  for (const SquareCorners& s : fp.squares()) field["squares"].push_back(corners_json(s));
  for (const Segment& s : fp.segments()) {
    field["segments"].push_back({
        {"index", s.index},
        {"region", to_string(s.region)},
        {"side", to_string(s.side)},
        {"min", to_json(s.bounds.min)},
        {"max", to_json(s.bounds.max)},
        {"midpoint", to_json(s.midpoint)},
    });
  }

  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : sim.nodes()) {
    nodes.push_back({
        {"id", n.id.value},
        {"kind", to_string(n.kind)},
        {"pos", to_json(n.pos)},
        {"region", to_string(n.region)},
        {"segment", n.segment},
        {"energy_j", n.energy},
        {"initial_energy_j", n.initial_energy},
        {"alive", n.alive},
    });
  }

  nlohmann::json clusters = nlohmann::json::array();
  for (const Cluster& c : sim.clusters()) {
    nlohmann::json members = nlohmann::json::array();
    for (NodeId id : c.members()) members.push_back(id.value);
    clusters.push_back({
        {"segment", c.segment().index},
        {"members", members},
        {"head", c.head() ? nlohmann::json(c.head()->value) : nlohmann::json(nullptr)},
    });
  }

  return {
      {"protocol", to_string(sim.config().protocol)},
      {"seed", sim.config().seed},
      {"base_station", sim.base_station().value},
      {"field", field},
      {"nodes", nodes},
      {"clusters", clusters},
  };
}

nlohmann::json round_trace_json(const Simulation& sim, const RoundMetrics& m) {
  nlohmann::json heads = nlohmann::json::array();
  for (NodeId id : sim.heads()) heads.push_back(id.value);
  nlohmann::json routes = nlohmann::json::array();
  for (const auto& [from, to] : sim.routes().next_hop) routes.push_back({from.value, to.value});
  return {{"round", m.round}, {"heads", heads}, {"next_hop", routes}, {"metrics", to_json(m)}};
}

}  // namespace edctr
