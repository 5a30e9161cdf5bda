#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "edctr/engine.hpp"

namespace edctr {

/// One (protocol, relay setting) combination of an experiment. Baseline
/// cells always carry zero relays.
struct Cell {
  Protocol protocol = Protocol::EDCTR;
  RelaySetting relays{};

  /// File-name friendly label, e.g. "EDCTR-r4", "EDCTR-auto", "LEACH".
  std::string label() const;
  friend bool operator==(const Cell&, const Cell&) = default;
};

Cell make_cell(Protocol protocol, std::size_t relays);

struct ExperimentPlan {
  SimConfig base_config{};
  std::vector<Cell> sweep;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "results";

  /// Throws ConfigError: empty sweep or seeds, duplicate seeds, or an invalid
  /// base config.
  void validate() const;
  /// base_config specialised to one cell and seed.
  SimConfig config_for(const Cell& cell, std::uint64_t seed) const;

  friend bool operator==(const ExperimentPlan&, const ExperimentPlan&) = default;
};

/// Reads and validates a JSON plan. Missing files raise Io; malformed JSON,
/// unknown keys and bad values raise ConfigError naming the field.
ExperimentPlan parse_config(const std::filesystem::path& file);
ExperimentPlan parse_config_text(std::string_view text);
ExperimentPlan plan_from_json(const nlohmann::json& j);

/// Every field written out, so plan_from_json(to_json(p)) == p.
nlohmann::json to_json(const ExperimentPlan& plan);

/// 16 hex digits identifying the plan's content (output_dir excluded).
std::string plan_hash(const ExperimentPlan& plan);

struct CellResult {
  Cell cell;
  std::vector<SimulationResult> runs;  // in plan seed order
};

struct PlanResult {
  ExperimentPlan plan;
  std::vector<CellResult> cells;

  const CellResult* find(const Cell& cell) const noexcept;
};

/// Runs every (cell, seed) simulation. Jobs may execute on `threads` worker
/// threads (0 picks the hardware concurrency); results do not depend on it.
PlanResult execute_plan(const ExperimentPlan& plan, unsigned threads = 0);

/// Per-round seed mean and sample standard deviation of every metric column.
std::vector<std::vector<double>> aggregate_means(const CellResult& cell, Round horizon);

enum class FigureId { Delay, PacketLoss, Throughput, InnerEnergy, MiddleEnergy, OuterEnergy };

std::string_view to_string(FigureId id) noexcept;
/// Throws ConfigError listing the valid ids.
FigureId parse_figure_id(std::string_view name);
std::vector<FigureId> all_figures();
/// Cells a figure compares.
std::vector<Cell> required_cells(FigureId id);

/// Columnar CSV: round, time_s, then the seed-mean metric of each compared
/// cell. Energy figures are cumulative per region. Throws MissingCell when a
/// required cell is absent.
std::string emit_figure_series(const PlanResult& results, FigureId id);

/// Directory the plan writes into: output_dir / "plan-<hash>".
std::filesystem::path plan_directory(const ExperimentPlan& plan);

/// Executes the plan and writes plan.json, runs/<cell>_seed<k>.csv,
/// aggregate/<cell>.csv, summary.json and figures/<figure>.csv for each
/// figure whose cells are present. The output directory is checked for
/// writability before any simulation starts (Io error otherwise).
std::filesystem::path run_plan(const ExperimentPlan& plan, unsigned threads = 0);

}  // namespace edctr
