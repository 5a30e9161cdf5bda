#include "edctr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "edctr/error.hpp"
#include "edctr/report.hpp"

namespace edctr {

std::string Cell::label() const {
  std::string out(to_string(protocol));
  if (protocol != Protocol::EDCTR) return out;
  return relays.automatic ? out + "-auto" : out + "-r" + std::to_string(relays.count);
}

Cell make_cell(Protocol protocol, std::size_t relays) {
  if (protocol != Protocol::EDCTR) return Cell{protocol, {}};
  return Cell{protocol, RelaySetting{false, relays}};
}

void ExperimentPlan::validate() const {
  base_config.validate();
  if (sweep.empty()) throw ConfigError("sweep", "must contain at least one cell");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (sweep[i] == sweep[j]) throw ConfigError("sweep", "duplicate cell " + sweep[i].label());
    }
  }
  if (seeds.empty()) throw ConfigError("seeds", "must contain at least one seed");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw ConfigError("seeds", "seeds must be distinct");
}

SimConfig ExperimentPlan::config_for(const Cell& cell, std::uint64_t seed) const {
  SimConfig cfg = base_config;
  cfg.protocol = cell.protocol;
  cfg.relays = cell.relays;
  cfg.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

using nlohmann::json;

/// Reads keys of one JSON object and rejects anything it did not consume.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "config" : prefix_, "must be a JSON object");
  }

  std::string path(std::string_view key) const { return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key); }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  void real(std::string_view key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "must be a number");
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    if (const json* v = find(key)) out = as_integer<Int>(*v, path(key));
  }

  template <typename Int>
  static Int as_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where, "must be an integer");
    if (v.is_number_unsigned()) return static_cast<Int>(v.get<std::uint64_t>());
    const auto s = v.get<std::int64_t>();
    if (s < 0) throw ConfigError(where, "must be non-negative, got " + std::to_string(s));
    return static_cast<Int>(s);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

Protocol protocol_from(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "must be a string (EDCTR, LEACH or LEACH_C)");
  auto p = parse_protocol(v.get<std::string>());
  if (!p) throw ConfigError(where, "unknown protocol \"" + v.get<std::string>() + "\" (EDCTR, LEACH or LEACH_C)");
  return *p;
}

RelaySetting relays_from(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() != "auto") throw ConfigError(where, "must be a non-negative integer or \"auto\"");
    return RelaySetting{true, 0};
  }
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(where, "must be a non-negative integer or \"auto\"");
  }
  return RelaySetting{false, v.get<std::size_t>()};
}

json relays_to_json(const RelaySetting& r) { return r.automatic ? json("auto") : json(r.count); }

std::string_view to_string(ProportionVariant v) {
  return v == ProportionVariant::Literal ? "literal" : "m0";
}

}  // namespace

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  SimConfig& c = plan.base_config;
  ObjectReader top(j, "");

  if (const json* v = top.find("protocol")) c.protocol = protocol_from(*v, "protocol");
  top.integer("node_count", c.node_count);
  if (const json* v = top.find("relay_count")) c.relays = relays_from(*v, "relay_count");
  top.integer("relay_fallback", c.relay_fallback);
  top.real("field_side", c.field_side);
  top.integer("rounds", c.rounds);
  top.integer("seed", c.seed);
  top.real("leach_p", c.leach_p);
  top.real("sensor_energy", c.sensor_energy);
  top.real("relay_energy", c.relay_energy);
  top.real("round_duration", c.round_duration);
  top.real("loss_probability", c.loss_probability);

  if (const json* v = top.find("radio")) {
    ObjectReader r(*v, "radio");
    r.real("e_elec", c.radio.e_elec);
    r.real("eps_fs", c.radio.eps_fs);
    r.real("eps_mp", c.radio.eps_mp);
    r.real("e_da", c.radio.e_da);
    r.finish();
  }
  if (const json* v = top.find("packet")) {
    ObjectReader r(*v, "packet");
    r.integer("payload_bits", c.packet.payload_bits);
    r.integer("control_bits", c.packet.control_bits);
    r.finish();
  }
  if (const json* v = top.find("delay")) {
    ObjectReader r(*v, "delay");
    r.real("per_hop_fixed", c.delay.per_hop_fixed);
    r.real("propagation_speed", c.delay.propagation_speed);
    r.real("bit_rate", c.delay.bit_rate);
    r.finish();
  }
  if (const json* v = top.find("relay_formula")) {
    ObjectReader r(*v, "relay_formula");
    RelayProportionInputs& f = c.relay_formula;
    r.real("a", f.a);
    r.real("b", f.b);
    r.real("m", f.m);
    r.real("m0", f.m0);
    r.real("u", f.u);
    r.real("e_relay", f.e_relay);
    r.real("e_sensor", f.e_sensor);
    if (const json* variant = r.find("variant")) {
      const std::string name = variant->is_string() ? variant->get<std::string>() : "";
      if (name == "literal") {
        c.relay_formula_variant = ProportionVariant::Literal;
      } else if (name == "m0") {
        c.relay_formula_variant = ProportionVariant::SubstituteM0;
      } else {
        throw ConfigError("relay_formula.variant", "must be \"literal\" or \"m0\"");
      }
    }
    r.finish();
  }

  if (const json* v = top.find("seeds")) {
    if (!v->is_array()) throw ConfigError("seeds", "must be an array of integers");
    for (std::size_t i = 0; i < v->size(); ++i) {
      plan.seeds.push_back(ObjectReader::as_integer<std::uint64_t>((*v)[i], "seeds[" + std::to_string(i) + "]"));
    }
  } else {
    plan.seeds = {c.seed};
  }

  if (const json* v = top.find("sweep")) {
    if (!v->is_array()) throw ConfigError("sweep", "must be an array of {protocol, relays} cells");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string where = "sweep[" + std::to_string(i) + "]";
      ObjectReader r((*v)[i], where);
      Cell cell{c.protocol, c.relays};
      if (const json* p = r.find("protocol")) cell.protocol = protocol_from(*p, where + ".protocol");
      if (const json* k = r.find("relays")) cell.relays = relays_from(*k, where + ".relays");
      r.finish();
      if (cell.protocol != Protocol::EDCTR) cell.relays = {};
      plan.sweep.push_back(cell);
    }
  } else {
    Cell cell{c.protocol, c.protocol == Protocol::EDCTR ? c.relays : RelaySetting{}};
    plan.sweep.push_back(cell);
  }

  if (const json* v = top.find("output_dir")) {
    if (!v->is_string()) throw ConfigError("output_dir", "must be a string path");
    plan.output_dir = v->get<std::string>();
  }
  top.finish();

  plan.validate();
  return plan;
}

ExperimentPlan parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("json", std::string("malformed JSON: ") + e.what());
  }
  return plan_from_json(j);
}

ExperimentPlan parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCategory::Io, "cannot open config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

json to_json(const ExperimentPlan& plan) {
  const SimConfig& c = plan.base_config;
  const RelayProportionInputs& f = c.relay_formula;
  json sweep = json::array();
  for (const Cell& cell : plan.sweep) {
    sweep.push_back({{"protocol", to_string(cell.protocol)}, {"relays", relays_to_json(cell.relays)}});
  }
  return {
      {"protocol", to_string(c.protocol)},
      {"node_count", c.node_count},
      {"relay_count", relays_to_json(c.relays)},
      {"relay_fallback", c.relay_fallback},
      {"relay_formula",
       {{"a", f.a}, {"b", f.b}, {"m", f.m}, {"m0", f.m0}, {"u", f.u}, {"e_relay", f.e_relay},
        {"e_sensor", f.e_sensor}, {"variant", to_string(c.relay_formula_variant)}}},
      {"field_side", c.field_side},
      {"rounds", c.rounds},
      {"seed", c.seed},
      {"radio", {{"e_elec", c.radio.e_elec}, {"eps_fs", c.radio.eps_fs}, {"eps_mp", c.radio.eps_mp}, {"e_da", c.radio.e_da}}},
      {"packet", {{"payload_bits", c.packet.payload_bits}, {"control_bits", c.packet.control_bits}}},
      {"delay",
       {{"per_hop_fixed", c.delay.per_hop_fixed},
        {"propagation_speed", c.delay.propagation_speed},
        {"bit_rate", c.delay.bit_rate}}},
      {"leach_p", c.leach_p},
      {"sensor_energy", c.sensor_energy},
      {"relay_energy", c.relay_energy},
      {"round_duration", c.round_duration},
      {"loss_probability", c.loss_probability},
      {"seeds", plan.seeds},
      {"sweep", sweep},
      {"output_dir", plan.output_dir.string()},
  };
}

std::string plan_hash(const ExperimentPlan& plan) {
  json j = to_json(plan);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------
// Execution

const CellResult* PlanResult::find(const Cell& cell) const noexcept {
  auto it = std::find_if(cells.begin(), cells.end(), [&](const CellResult& c) { return c.cell == cell; });
  return it == cells.end() ? nullptr : &*it;
}

PlanResult execute_plan(const ExperimentPlan& plan, unsigned threads) {
  plan.validate();
  PlanResult result{plan, {}};
  result.cells.resize(plan.sweep.size());
  for (std::size_t i = 0; i < plan.sweep.size(); ++i) {
    result.cells[i].cell = plan.sweep[i];
    result.cells[i].runs.resize(plan.seeds.size());
  }

  const std::size_t jobs = plan.sweep.size() * plan.seeds.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t cell = job / plan.seeds.size();
      const std::size_t seed = job % plan.seeds.size();
      try {
        result.cells[cell].runs[seed] = run_simulation(plan.config_for(plan.sweep[cell], plan.seeds[seed]));
        spdlog::debug("finished {} seed {}", plan.sweep[cell].label(), plan.seeds[seed]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return result;
}

std::vector<std::vector<double>> aggregate_means(const CellResult& cell, Round horizon) {
  const std::size_t columns = metric_columns().size();
  std::vector<std::vector<std::vector<double>>> per_seed;  // seed -> round -> values
  for (const SimulationResult& run : cell.runs) {
    std::vector<std::vector<double>> rows;
    for (const RoundMetrics& m : pad_series(run.rounds, horizon)) rows.push_back(metric_values(m));
    per_seed.push_back(std::move(rows));
  }
  const auto n = static_cast<double>(per_seed.size());
  std::vector<std::vector<double>> out(horizon, std::vector<double>(2 * columns, 0.0));
  for (Round r = 0; r < horizon; ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      double sum = 0.0;
      for (const auto& rows : per_seed) sum += rows[r][c];
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto& rows : per_seed) ss += (rows[r][c] - mean) * (rows[r][c] - mean);
      out[r][2 * c] = mean;
      out[r][2 * c + 1] = per_seed.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Figures

std::string_view to_string(FigureId id) noexcept {
  switch (id) {
    case FigureId::Delay: return "delay";
    case FigureId::PacketLoss: return "packet_loss";
    case FigureId::Throughput: return "throughput";
    case FigureId::InnerEnergy: return "inner_energy";
    case FigureId::MiddleEnergy: return "middle_energy";
    case FigureId::OuterEnergy: return "outer_energy";
  }
  return "?";
}

std::vector<FigureId> all_figures() {
  return {FigureId::Delay,       FigureId::PacketLoss,   FigureId::Throughput,
          FigureId::InnerEnergy, FigureId::MiddleEnergy, FigureId::OuterEnergy};
}

FigureId parse_figure_id(std::string_view name) {
  std::string valid;
  for (FigureId id : all_figures()) {
    if (to_string(id) == name) return id;
    valid += (valid.empty() ? "" : ", ") + std::string(to_string(id));
  }
  throw ConfigError("figure_id", "unknown figure \"" + std::string(name) + "\"; valid ids: " + valid);
}

std::vector<Cell> required_cells(FigureId id) {
  switch (id) {
    case FigureId::Delay:
    case FigureId::PacketLoss:
    case FigureId::Throughput:
      return {make_cell(Protocol::EDCTR, 0), make_cell(Protocol::EDCTR, 2), make_cell(Protocol::EDCTR, 4)};
    case FigureId::InnerEnergy:
    case FigureId::MiddleEnergy:
    case FigureId::OuterEnergy:
      return {make_cell(Protocol::EDCTR, 4), make_cell(Protocol::LEACH, 0)};
  }
  return {};
}

namespace {

struct FigureColumn {
  std::size_t metric;  // index into metric_columns()
  bool cumulative;
};

FigureColumn figure_column(FigureId id) {
  switch (id) {
    case FigureId::Delay: return {10, false};
    case FigureId::PacketLoss: return {9, false};
    case FigureId::Throughput: return {12, false};
    case FigureId::InnerEnergy: return {3, true};
    case FigureId::MiddleEnergy: return {4, true};
    case FigureId::OuterEnergy: return {5, true};
  }
  return {0, false};
}

}  // namespace

std::string emit_figure_series(const PlanResult& results, FigureId id) {
  std::vector<const CellResult*> cells;
  for (const Cell& cell : required_cells(id)) {
    const CellResult* found = results.find(cell);
    if (!found) {
      throw Error(ErrorCategory::MissingCell,
                  fmt::format("figure {} needs cell ({}, {} relays) which the plan does not contain", to_string(id),
                              to_string(cell.protocol), cell.relays.count));
    }
    cells.push_back(found);
  }
  const bool energy = figure_column(id).cumulative;
  if (energy) {
    if (const CellResult* extra = results.find(make_cell(Protocol::LEACH_C, 0))) cells.push_back(extra);
  }

  const Round horizon = results.plan.base_config.rounds;
  const double duration = results.plan.base_config.round_duration;
  const FigureColumn column = figure_column(id);

  std::vector<std::vector<std::vector<double>>> means;
  for (const CellResult* c : cells) means.push_back(aggregate_means(*c, horizon));

  std::ostringstream out;
  out << "round,time_s";
  for (const CellResult* c : cells) out << ',' << c->cell.label();
  out << '\n';
  std::vector<double> running(cells.size(), 0.0);
  for (Round r = 0; r < horizon; ++r) {
    out << (r + 1) << ',' << format_number((r + 1) * duration);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      double v = means[k][r][2 * column.metric];
      if (column.cumulative) {
        running[k] += v;
        v = running[k];
      }
      out << ',' << format_number(v);
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Output files

std::filesystem::path plan_directory(const ExperimentPlan& plan) {
  return plan.output_dir / ("plan-" + plan_hash(plan));
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCategory::Io, "failed to write " + path.string());
}

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCategory::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!(out << "ok")) throw Error(ErrorCategory::Io, "output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

json cell_summary(const CellResult& cell, const ExperimentPlan& plan) {
  json runs = json::array();
  double fnd = 0.0;
  double delay = 0.0;
  double delivered = 0.0;
  double lost = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < cell.runs.size(); ++i) {
    const SummaryStats& s = cell.runs[i].summary;
    json entry = to_json(s);
    entry["seed"] = plan.seeds[i];
    runs.push_back(entry);
    fnd += s.first_node_death ? *s.first_node_death : static_cast<double>(plan.base_config.rounds) + 1.0;
    delay += s.mean_delay;
    delivered += static_cast<double>(s.packets_delivered);
    lost += static_cast<double>(s.packets_lost);
    energy += s.energy_consumed;
  }
  const auto n = static_cast<double>(cell.runs.size());
  return {
      {"label", cell.cell.label()},
      {"protocol", to_string(cell.cell.protocol)},
      {"relays", relays_to_json(cell.cell.relays)},
      {"runs", runs},
      {"mean",
       {{"first_node_death_censored", fnd / n},
        {"mean_delay_s", delay / n},
        {"packets_delivered", delivered / n},
        {"packets_lost", lost / n},
        {"energy_consumed_j", energy / n}}},
  };
}

}  // namespace

std::filesystem::path run_plan(const ExperimentPlan& plan, unsigned threads) {
  plan.validate();
  const auto dir = plan_directory(plan);
  ensure_writable(dir);
  for (const char* sub : {"runs", "aggregate", "figures"}) ensure_writable(dir / sub);

  spdlog::debug("running {} cells x {} seeds into {}", plan.sweep.size(), plan.seeds.size(), dir.string());
  const PlanResult results = execute_plan(plan, threads);
  const Round horizon = plan.base_config.rounds;
  const double duration = plan.base_config.round_duration;

  write_file(dir / "plan.json", to_json(plan).dump(2) + "\n");

  json summary{{"plan_hash", plan_hash(plan)}, {"rounds", horizon}, {"cells", json::array()}};
  for (const CellResult& cell : results.cells) {
    for (std::size_t i = 0; i < cell.runs.size(); ++i) {
      std::ostringstream csv;
      write_run_csv(csv, pad_series(cell.runs[i].rounds, horizon), duration);
      write_file(dir / "runs" / fmt::format("{}_seed{}.csv", cell.cell.label(), plan.seeds[i]), csv.str());
    }

    std::ostringstream agg;
    agg << "round,time_s";
    for (const char* col : metric_columns()) agg << ',' << col << "_mean," << col << "_std";
    agg << '\n';
    const auto rows = aggregate_means(cell, horizon);
    for (Round r = 0; r < horizon; ++r) {
      agg << (r + 1) << ',' << format_number((r + 1) * duration);
      for (double v : rows[r]) agg << ',' << format_number(v);
      agg << '\n';
    }
    write_file(dir / "aggregate" / (cell.cell.label() + ".csv"), agg.str());
    summary["cells"].push_back(cell_summary(cell, plan));
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  for (FigureId id : all_figures()) {
    const auto needed = required_cells(id);
    const bool present =
        std::all_of(needed.begin(), needed.end(), [&](const Cell& c) { return results.find(c) != nullptr; });
    if (!present) continue;
    write_file(dir / "figures" / (std::string(to_string(id)) + ".csv"), emit_figure_series(results, id));
  }
  return dir;
}

}  // namespace edctr
