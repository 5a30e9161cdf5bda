#include <benchmark/benchmark.h>

#include <random>

#include "edctr/engine.hpp"
#include "edctr/experiment.hpp"

using namespace edctr;

namespace {

void BM_Classify(benchmark::State& state) {
  const FieldPartition fp = FieldPartition::equal_rings(100);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> coord(0, 100);
  std::vector<Point> points(4096);
  for (Point& p : points) p = {coord(gen), coord(gen)};
  std::size_t i = 0;
  for (auto _ : state) {
    const Point p = points[i++ & 4095];
    benchmark::DoNotOptimize(fp.classify(p));
    benchmark::DoNotOptimize(fp.segment_index_of(p));
  }
}
BENCHMARK(BM_Classify);

void BM_BuildRoutes(benchmark::State& state) {
  SimConfig cfg;
  cfg.relays = {false, 4};
  Simulation sim(cfg);
  sim.run_round();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_routes(sim.clusters(), sim.nodes(), sim.base_station()));
  }
}
BENCHMARK(BM_BuildRoutes);

// One full round; a fresh network is deployed whenever the previous one runs
// out of rounds so that every timed round does the same kind of work.
void BM_Round(benchmark::State& state) {
  SimConfig cfg;
  cfg.protocol = static_cast<Protocol>(state.range(0));
  cfg.node_count = static_cast<std::size_t>(state.range(1));
  cfg.relays = {false, cfg.protocol == Protocol::EDCTR ? 4u : 0u};
  auto sim = std::make_unique<Simulation>(cfg);
  for (auto _ : state) {
    if (sim->next_round() > 500) {
      state.PauseTiming();
      sim = std::make_unique<Simulation>(cfg);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(sim->run_round());
  }
  state.SetLabel(std::string(to_string(cfg.protocol)));
}
BENCHMARK(BM_Round)->ArgsProduct({{0, 1, 2}, {41, 200, 1000}});

void BM_FullRun(benchmark::State& state) {
  SimConfig cfg;
  cfg.relays = {false, 4};
  cfg.rounds = 2000;
  for (auto _ : state) benchmark::DoNotOptimize(run_simulation(cfg));
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

void BM_Aggregate(benchmark::State& state) {
  ExperimentPlan plan;
  plan.base_config.rounds = 2000;
  plan.sweep = {make_cell(Protocol::EDCTR, 4)};
  plan.seeds = {1, 2, 3, 4, 5};
  const auto results = execute_plan(plan, 1);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_means(results.cells[0], 2000));
}
BENCHMARK(BM_Aggregate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
