#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edctr/engine.hpp"

namespace edctr {

/// Column order of per-run CSV files.
inline constexpr const char* kRunCsvHeader =
    "round,time_s,alive,alive_relays,cluster_heads,energy_inner_j,energy_middle_j,energy_outer_j,"
    "energy_relay_j,packets_offered,packets_delivered,packets_lost,mean_delay_s,mean_hops,"
    "throughput_bps,residual_energy_j";

/// Numeric metric columns shared by run and aggregate CSVs (everything after
/// round and time_s).
std::span<const char* const> metric_columns() noexcept;

/// Values of metric_columns() for one round, in column order.
std::vector<double> metric_values(const RoundMetrics& m);

/// Extends a series to exactly `horizon` rounds. Rounds after network death
/// carry no traffic; relay survivors and residual energy are carried over.
std::vector<RoundMetrics> pad_series(std::span<const RoundMetrics> series, Round horizon);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

void write_run_csv(std::ostream& out, std::span<const RoundMetrics> padded, double round_duration);

nlohmann::json to_json(const SummaryStats& s);
nlohmann::json to_json(const RoundMetrics& m);
nlohmann::json to_json(const Point& p);

/// Field geometry, nodes and clusters of a simulation.
nlohmann::json topology_json(const Simulation& sim);
/// Heads, next hops and metrics of the round just executed.
nlohmann::json round_trace_json(const Simulation& sim, const RoundMetrics& m);

}  // namespace edctr
