// Command-line front end: runs an experiment plan and writes its result files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "edctr/error.hpp"
#include "edctr/experiment.hpp"
#include "edctr/report.hpp"

namespace {

constexpr int kUsageExit = 2;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("edctr");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("EDCTR_LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to "off"; only honour that when asked for.
    if (parsed != spdlog::level::off || std::string(level) == "off") {
      spdlog::set_level(parsed);
    } else {
      spdlog::warn("ignoring unknown EDCTR_LOG_LEVEL \"{}\"", level);
    }
  }
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> protocol;
  std::optional<std::string> relays;
  std::optional<edctr::Round> rounds;
};

void apply(const Overrides& o, edctr::ExperimentPlan& plan) {
  using edctr::ConfigError;
  using edctr::Protocol;
  if (o.seed) {
    plan.base_config.seed = *o.seed;
    plan.seeds = {*o.seed};
  }
  if (o.out) plan.output_dir = *o.out;
  if (o.rounds) plan.base_config.rounds = *o.rounds;

  if (o.protocol || o.relays) {
    // Either flag collapses the sweep to one cell built from the base config.
    if (o.protocol) {
      auto p = edctr::parse_protocol(*o.protocol);
      if (!p) throw ConfigError("--protocol", "unknown protocol \"" + *o.protocol + "\" (EDCTR, LEACH or LEACH_C)");
      plan.base_config.protocol = *p;
    }
    if (o.relays) {
      if (plan.base_config.protocol != Protocol::EDCTR) {
        throw ConfigError("--relays", "relays only apply to the EDCTR protocol");
      }
      if (*o.relays == "auto") {
        plan.base_config.relays = {true, 0};
      } else {
        std::size_t used = 0;
        long long k = -1;
        try {
          k = std::stoll(*o.relays, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != o.relays->size() || k < 0) {
          throw ConfigError("--relays", "must be a non-negative integer or \"auto\", got \"" + *o.relays + "\"");
        }
        plan.base_config.relays = {false, static_cast<std::size_t>(k)};
      }
    }
    edctr::Cell cell{plan.base_config.protocol, plan.base_config.relays};
    if (cell.protocol != Protocol::EDCTR) cell.relays = {};
    plan.sweep = {cell};
  }
  plan.validate();
}

void dump_topology(const edctr::ExperimentPlan& plan, const std::string& path) {
  const edctr::Simulation sim(plan.config_for(plan.sweep.front(), plan.seeds.front()));
  std::ofstream out(path);
  out << edctr::topology_json(sim).dump(2) << '\n';
  if (!out) throw edctr::Error(edctr::ErrorCategory::Io, "failed to write topology dump " + path);
}

void write_trace(const edctr::ExperimentPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw edctr::Error(edctr::ErrorCategory::Io, "cannot open trace file " + path);
  edctr::run_simulation(plan.config_for(plan.sweep.front(), plan.seeds.front()),
                        [&](const edctr::Simulation& sim, const edctr::RoundMetrics& m) {
                          out << edctr::round_trace_json(sim, m).dump() << '\n';
                        });
  if (!out) throw edctr::Error(edctr::ErrorCategory::Io, "failed to write trace file " + path);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Round-based WSN simulator for EDCTR, LEACH and LEACH-C"};
  std::string config_path;
  Overrides overrides;
  unsigned threads = 0;
  std::string topology_path;
  std::string trace_path;
  std::string figure;

  app.add_option("--config", config_path, "JSON experiment plan")->required();
  app.add_option("--seed", overrides.seed, "Run a single seed instead of the plan's seed list");
  app.add_option("--out", overrides.out, "Output directory (a plan-<hash> subdirectory is created)");
  app.add_option("--protocol", overrides.protocol, "EDCTR, LEACH or LEACH_C; replaces the sweep with one cell");
  app.add_option("--relays", overrides.relays, "Relay count or \"auto\"; replaces the sweep with one cell");
  app.add_option("--rounds", overrides.rounds, "Simulation horizon in rounds");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_option("--topology", topology_path, "Also write the first cell's deployed topology as JSON");
  app.add_option("--trace", trace_path, "Also write a per-round JSON-lines trace of the first cell and seed");
  app.add_option("--figure", figure, "Print one figure series to stdout instead of only writing files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    std::optional<edctr::FigureId> figure_id;
    if (!figure.empty()) figure_id = edctr::parse_figure_id(figure);

    edctr::ExperimentPlan plan = edctr::parse_config(config_path);
    apply(overrides, plan);

    if (!topology_path.empty()) dump_topology(plan, topology_path);
    if (!trace_path.empty()) write_trace(plan, trace_path);

    if (figure_id) {
      // Check the cells before spending time on the simulations.
      for (const edctr::Cell& cell : edctr::required_cells(*figure_id)) {
        if (std::find(plan.sweep.begin(), plan.sweep.end(), cell) == plan.sweep.end()) {
          throw edctr::Error(edctr::ErrorCategory::MissingCell,
                             "figure " + figure + " needs cell " + cell.label() + " which the plan does not contain");
        }
      }
    }

    const auto dir = edctr::run_plan(plan, threads);
    if (figure_id) {
      std::ifstream in(dir / "figures" / (figure + ".csv"));
      std::cout << in.rdbuf();
    } else {
      std::cout << dir.string() << '\n';
    }
    return 0;
  } catch (const edctr::Error& e) {
    spdlog::error("{} error: {}", edctr::to_string(e.category()), e.what());
    return edctr::exit_code(e.category());
  } catch (const std::exception& e) {
    spdlog::error("unexpected failure: {}", e.what());
    return 1;
  }
}
