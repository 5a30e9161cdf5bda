// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "edctr/error.hpp"
#include "edctr/experiment.hpp"
#include "edctr/report.hpp"

using namespace edctr;
namespace fs = std::filesystem;

namespace {

constexpr Round kHorizon = 2000;
constexpr std::size_t kSeeds = 20;
constexpr double kSignAlpha = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// One-sided sign test: probability of at least `wins` successes out of
// `trials` fair coin flips.
double sign_test_p(std::size_t wins, std::size_t trials) {
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(trials - i) / static_cast<double>(i + 1);
    p += c;
  }
  return p / std::pow(2.0, static_cast<double>(trials));
}

struct PairedComparison {
  double mean_better = 0;
  double mean_worse = 0;
  std::size_t wins = 0;
  std::size_t trials = 0;  // ties excluded
  double p = 1.0;

  bool pass() const { return mean_better < mean_worse && p < kSignAlpha; }
};

// Tests "lower is better": a[i] should be below b[i].
PairedComparison compare_lower(const std::vector<double>& a, const std::vector<double>& b) {
  PairedComparison c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    c.mean_better += a[i] / static_cast<double>(a.size());
    c.mean_worse += b[i] / static_cast<double>(b.size());
    if (a[i] == b[i]) continue;
    ++c.trials;
    if (a[i] < b[i]) ++c.wins;
  }
  c.p = sign_test_p(c.wins, c.trials);
  return c;
}

std::vector<double> negate(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

// ---------------------------------------------------------------------------

Outcome geometry_exactness() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> coord(-1000, 1000), half(0, 500);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const Point c{coord(gen), coord(gen)};
    const double d = half(gen);
    const double right = c.x + d, left = c.x - d, top = c.y + d, bottom = c.y - d;
    const SquareCorners oracle{{right, top}, {right, bottom}, {left, top}, {left, bottom}};
    if (!(internal_square_corners(c, d) == oracle)) ++mismatches;
    if (!(nth_square_corners(c, d) == oracle)) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu mismatches over 1000 (center, d) pairs, both functions", mismatches)};
}

Outcome partition_soundness() {
  const FieldPartition fp = FieldPartition::equal_rings(100);
  const auto [d1, d2, d3] = fp.distances();
  const Point c = fp.center();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> coord(0, 100);
  std::size_t bad_region = 0, bad_segment = 0, bad_nesting = 0;
  for (int i = 0; i < 10000; ++i) {
    const Point p{coord(gen), coord(gen)};
    const double cheb = std::max(std::abs(p.x - c.x), std::abs(p.y - c.y));
    const int in_squares = (cheb <= d1) + (cheb <= d2) + (cheb <= d3);
    const Region expected = in_squares == 3 ? Region::Inner : in_squares == 2 ? Region::Middle : Region::Outer;
    if (fp.classify(p) != expected) ++bad_region;

    const Segment& s = fp.segment_of(p);
    std::size_t interiors = 0;
    for (const Segment& other : fp.segments()) {
      const Rect& r = other.bounds;
      interiors += p.x > r.min.x && p.x < r.max.x && p.y > r.min.y && p.y < r.max.y;
    }
    if (!s.bounds.contains(p) || s.region != expected || interiors != 1) ++bad_segment;

    // Walking outward toward p from the center never moves to a lower ring.
    int prev = 0;
    for (int k = 0; k <= 10; ++k) {
      const double t = k / 10.0;
      const int r = region_rank(fp.classify({c.x + t * (p.x - c.x), c.y + t * (p.y - c.y)}));
      if (r < prev) ++bad_nesting;
      prev = r;
    }
  }
  const auto& sq = fp.squares();
  for (std::size_t i = 1; i < sq.size(); ++i) {
    if (!(sq[i].top_right.x > sq[i - 1].top_right.x && sq[i].bottom_left.y < sq[i - 1].bottom_left.y)) ++bad_nesting;
  }
  return {bad_region + bad_segment + bad_nesting == 0,
          fmt("10000 points: %zu region, %zu segment, %zu nesting violations", bad_region, bad_segment, bad_nesting)};
}

double p_opt_oracle(double a, double b, double m, double u, double er, double es) {
  const double numerator = (1.0 + b) * er;
  const double bracket = 0.0 - (a + b) + m * (-b + u);
  return numerator / ((1.0 + m) * (a + m) * bracket * es);
}

Outcome p_opt_fidelity() {
  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> v(-5, 5), pos(0.1, 5);
  std::size_t mismatches = 0, singular_missed = 0, evaluated = 0;
  for (int i = 0; i < 1000; ++i) {
    const RelayProportionInputs in{v(gen), v(gen), v(gen), pos(gen), v(gen), pos(gen), pos(gen)};
    const double expected = p_opt_oracle(in.a, in.b, in.m, in.u, in.e_relay, in.e_sensor);
    if (!std::isfinite(expected)) continue;
    ++evaluated;
    const double got = relay_proportion(in);
    if (!(got == expected)) ++mismatches;
  }
  // Each denominator factor forced to zero in turn.
  std::uniform_int_distribution<int> small(1, 6);
  std::size_t singular_cases = 0;
  for (int i = 0; i < 300; ++i) {
    const double a = small(gen), b = small(gen);
    RelayProportionInputs in{a, b, 1.0, 0.5, 0.0, 1.0, 1.0};
    switch (i % 4) {
      case 0: in.u = a + 2 * b; break;                     // bracket = 0
      case 1: in.m = -1; in.u = 1; break;                  // (1+m) = 0
      case 2: in.m = -a; in.u = b; break;                  // (a+m) = 0
      case 3: in.e_sensor = 0; in.u = 2 * b + a + 1; break;  // sensor energy 0
    }
    ++singular_cases;
    try {
      relay_proportion(in);
      ++singular_missed;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::SingularFormula) ++singular_missed;
    }
  }
  return {mismatches == 0 && singular_missed == 0 && evaluated == 1000,
          fmt("%zu/%zu exact, %zu/%zu singular inputs raised the singular-formula error", evaluated - mismatches,
              evaluated, singular_cases - singular_missed, singular_cases)};
}

Outcome ch_election_oracle() {
  const FieldPartition fp = FieldPartition::equal_rings(100);
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> size(1, 15), offset(-4, 4), level(0, 5), pick_seg(0, 8);
  std::size_t initial_bad = 0, rotate_bad = 0, ties = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Segment seg = fp.segments()[static_cast<std::size_t>(pick_seg(gen))];
    const int n = size(gen);
    std::vector<Node> nodes;
    std::vector<NodeId> members;
    for (int i = 0; i < n; ++i) {
      Node node;
      node.id = NodeId{static_cast<std::uint32_t>(i)};
      node.pos = {seg.midpoint.x + offset(gen), seg.midpoint.y + offset(gen)};
      node.energy = 0.1 * level(gen);
      node.initial_energy = 0.5;
      node.alive = node.energy > 0;
      nodes.push_back(node);
      members.push_back(node.id);
    }
    std::shuffle(members.begin(), members.end(), gen);
    Cluster cluster(seg, members);

    // Brute force over ascending ids; strict comparison keeps the lowest id.
    std::optional<std::uint32_t> near, rich;
    double near_d = 0, rich_e = 0;
    std::size_t near_count = 0, rich_count = 0;
    for (int i = 0; i < n; ++i) {
      if (!nodes[i].alive) continue;
      const double d = std::hypot(nodes[i].pos.x - seg.midpoint.x, nodes[i].pos.y - seg.midpoint.y);
      if (!near || d < near_d) {
        near = i;
        near_d = d;
      }
      if (!rich || nodes[i].energy > rich_e) {
        rich = i;
        rich_e = nodes[i].energy;
      }
    }
    if (!near) {
      bool threw = false;
      try {
        elect_initial_ch(cluster, nodes);
      } catch (const Error&) {
        threw = true;
      }
      initial_bad += !threw;
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (!nodes[i].alive) continue;
      near_count += std::hypot(nodes[i].pos.x - seg.midpoint.x, nodes[i].pos.y - seg.midpoint.y) == near_d;
      rich_count += nodes[i].energy == rich_e;
    }
    ties += (near_count > 1) + (rich_count > 1);
    initial_bad += elect_initial_ch(cluster, nodes).value != *near;
    rotate_bad += rotate_ch(cluster, nodes, 1).value != *rich;
  }
  return {initial_bad + rotate_bad == 0,
          fmt("500 clusters (%zu with ties): %zu initial, %zu rotation disagreements", ties, initial_bad, rotate_bad)};
}

Outcome energy_conservation() {
  SimConfig cfg;
  cfg.protocol = Protocol::EDCTR;
  cfg.relays = {false, 4};
  cfg.rounds = kHorizon;
  Simulation sim(cfg);
  double before = sim.residual_energy();
  const double initial = before;
  double max_round_error = 0, debit_sum = 0;
  Round rounds = 0;
  while (sim.network_alive() && sim.next_round() <= cfg.rounds) {
    const RoundMetrics m = sim.run_round();
    const double after = sim.residual_energy();
    max_round_error = std::max(max_round_error, std::abs((before - after) - m.total_debit));
    max_round_error = std::max(max_round_error, std::abs(m.total_debit - m.energy_consumed()));
    debit_sum += m.total_debit;
    before = after;
    ++rounds;
  }
  const double drift = std::abs((initial - before) - debit_sum);
  return {max_round_error <= 1e-9 && drift <= 1e-9 && rounds == kHorizon,
          fmt("%u rounds, max per-round error %.3g J, accumulated drift %.3g J", rounds, max_round_error, drift)};
}

// The 20-seed sweep shared by the figure-ordering criteria.
struct Sweep {
  PlanResult result;

  static Sweep run() {
    ExperimentPlan plan;
    plan.base_config.rounds = kHorizon;
    plan.sweep = {make_cell(Protocol::EDCTR, 0), make_cell(Protocol::EDCTR, 2), make_cell(Protocol::EDCTR, 4),
                  make_cell(Protocol::LEACH, 0)};
    for (std::uint64_t s = 1; s <= kSeeds; ++s) plan.seeds.push_back(s);
    return {execute_plan(plan)};
  }

  const CellResult& cell(Protocol p, std::size_t relays) const { return *result.find(make_cell(p, relays)); }

  std::vector<double> per_seed(const CellResult& c, const std::function<double(const SimulationResult&)>& f) const {
    std::vector<double> out;
    for (const auto& run : c.runs) out.push_back(f(run));
    return out;
  }
};

Outcome delay_ordering(const Sweep& s) {
  auto delay = [](const SimulationResult& r) { return r.summary.mean_delay; };
  const auto d0 = s.per_seed(s.cell(Protocol::EDCTR, 0), delay);
  const auto d2 = s.per_seed(s.cell(Protocol::EDCTR, 2), delay);
  const auto d4 = s.per_seed(s.cell(Protocol::EDCTR, 4), delay);
  const auto a = compare_lower(d4, d2);
  const auto b = compare_lower(d2, d0);
  return {a.pass() && b.pass(),
          fmt("mean delay 4=%.5f 2=%.5f 0=%.5f s; 4<2 in %zu/%zu seeds (p=%.3g), 2<0 in %zu/%zu seeds (p=%.3g)",
              a.mean_better, a.mean_worse, b.mean_worse, a.wins, a.trials, a.p, b.wins, b.trials, b.p)};
}

Outcome throughput_ordering(const Sweep& s) {
  // Delivered bits per second averaged over the whole horizon.
  auto throughput = [](const SimulationResult& r) {
    double sum = 0;
    for (const auto& m : r.rounds) sum += m.throughput;
    return sum / static_cast<double>(kHorizon);
  };
  const auto t0 = s.per_seed(s.cell(Protocol::EDCTR, 0), throughput);
  const auto t2 = s.per_seed(s.cell(Protocol::EDCTR, 2), throughput);
  const auto t4 = s.per_seed(s.cell(Protocol::EDCTR, 4), throughput);
  const auto a = compare_lower(negate(t4), negate(t2));
  const auto b = compare_lower(negate(t2), negate(t0));
  return {a.pass() && b.pass(),
          fmt("mean throughput 4=%.0f 2=%.0f 0=%.0f bit/s; 4>2 in %zu/%zu seeds (p=%.3g), 2>0 in %zu/%zu seeds (p=%.3g)",
              -a.mean_better, -a.mean_worse, -b.mean_worse, a.wins, a.trials, a.p, b.wins, b.trials, b.p)};
}

Outcome inner_energy(const Sweep& s) {
  const auto edctr = aggregate_means(s.cell(Protocol::EDCTR, 4), kHorizon);
  const auto leach = aggregate_means(s.cell(Protocol::LEACH, 0), kHorizon);
  constexpr std::size_t kInner = 3;  // energy_inner_j
  double cum_e = 0, cum_l = 0;
  std::size_t sampled = 0, lower = 0;
  for (Round r = 0; r < kHorizon; ++r) {
    cum_e += edctr[r][2 * kInner];
    cum_l += leach[r][2 * kInner];
    if ((r + 1) % 10 != 0) continue;
    ++sampled;
    lower += cum_e < cum_l;
  }
  const double share = static_cast<double>(lower) / static_cast<double>(sampled);
  return {share >= 0.8, fmt("EDCTR-4 cumulative inner energy below LEACH at %zu/%zu sampled rounds (%.0f%%); "
                            "final %.4f vs %.4f J",
                            lower, sampled, 100 * share, cum_e, cum_l)};
}

Outcome region_lifetime(const Sweep& s) {
  // A region with no death within the horizon counts as horizon + 1.
  auto fnd = [](const CellResult& c, std::size_t region) {
    double sum = 0;
    for (const auto& run : c.runs) {
      const auto& r = run.summary.first_death_by_region[region];
      sum += r ? *r : kHorizon + 1.0;
    }
    return sum / static_cast<double>(c.runs.size());
  };
  bool pass = true;
  std::string detail;
  const char* names[] = {"inner", "middle", "outer"};
  for (std::size_t region = 0; region < 3; ++region) {
    const double e = fnd(s.cell(Protocol::EDCTR, 4), region);
    const double l = fnd(s.cell(Protocol::LEACH, 0), region);
    pass = pass && e >= l;
    detail += fmt("%s%s %.1f vs %.1f", region ? ", " : "", names[region], e, l);
  }
  return {pass, "first death EDCTR-4 vs LEACH: " + detail};
}

Outcome alive_nodes(const Sweep& s) {
  const auto edctr = aggregate_means(s.cell(Protocol::EDCTR, 4), kHorizon);
  const auto leach = aggregate_means(s.cell(Protocol::LEACH, 0), kHorizon);
  bool pass = true;
  std::string detail;
  for (int k = 1; k <= 10; ++k) {
    const Round r = kHorizon * k / 10;
    const double e = edctr[r - 1][0], l = leach[r - 1][0];
    pass = pass && e >= l;
    detail += fmt("%s%u:%.2f/%.2f", k > 1 ? " " : "", r, e, l);
  }
  return {pass, "alive EDCTR-4/LEACH at checkpoints " + detail};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

Outcome determinism() {
  const fs::path out = fs::temp_directory_path() / ("edctr-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(out);
  ExperimentPlan plan;
  plan.base_config.rounds = 300;
  plan.sweep = {make_cell(Protocol::EDCTR, 0), make_cell(Protocol::EDCTR, 2), make_cell(Protocol::EDCTR, 4),
                make_cell(Protocol::LEACH, 0), make_cell(Protocol::LEACH_C, 0)};
  plan.seeds = {1, 2, 3, 4, 5};
  plan.output_dir = out;
  const auto first = read_tree(run_plan(plan, 1));
  const auto second = read_tree(run_plan(plan, 4));
  fs::remove_all(out);
  std::size_t csvs = 0;
  for (const auto& [name, content] : first) csvs += name.ends_with(".csv");
  return {first == second && csvs > 0,
          fmt("%zu files (%zu CSV) compared across two runs: %s", first.size(), csvs,
              first == second ? "byte-identical" : "differ")};
}

Outcome baseline_sanity() {
  double worst_ratio = 1.0;
  std::size_t topk_violations = 0, rounds_checked = 0;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    SimConfig cfg;
    cfg.protocol = Protocol::LEACH;
    cfg.rounds = 100;
    cfg.seed = seed;
    Simulation leach(cfg);
    double heads = 0, expected = 0;
    std::size_t alive = cfg.node_count;
    for (int r = 0; r < 100; ++r) {
      expected += cfg.leach_p * static_cast<double>(alive);
      const auto m = leach.run_round();
      heads += static_cast<double>(m.cluster_heads);
      alive = m.alive;
    }
    const double ratio = heads / expected;
    if (std::abs(ratio - 1.0) > std::abs(worst_ratio - 1.0)) worst_ratio = ratio;

    cfg.protocol = Protocol::LEACH_C;
    Simulation central(cfg);
    const Point bs = central.nodes()[central.base_station().index()].pos;
    for (int r = 0; r < 100 && central.network_alive(); ++r) {
      std::vector<std::pair<double, std::uint32_t>> ranked;
      for (const Node& n : central.nodes()) {
        if (n.kind != NodeKind::Sensor || !n.can_act()) continue;
        // Status report to the base station precedes selection.
        const double left = n.energy - tx_energy(cfg.packet.control_bits, distance(n.pos, bs), cfg.radio);
        if (left > 0) ranked.emplace_back(-left, n.id.value);
      }
      std::sort(ranked.begin(), ranked.end());
      const auto k = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(cfg.leach_p * static_cast<double>(ranked.size()))), 1, ranked.size());
      std::vector<NodeId> top;
      for (std::size_t i = 0; i < k; ++i) top.push_back(NodeId{ranked[i].second});
      std::sort(top.begin(), top.end());
      central.run_round();
      ++rounds_checked;
      topk_violations += central.heads() != top;
    }
  }
  return {std::abs(worst_ratio - 1.0) <= 0.2 && topk_violations == 0,
          fmt("LEACH CH mean / (p*alive) worst seed %.3f; LEACH-C top-k mismatches %zu/%zu rounds", worst_ratio,
              topk_violations, rounds_checked)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  report(1, "geometry exactness", geometry_exactness);
  report(2, "partition soundness", partition_soundness);
  report(3, "relay proportion fidelity", p_opt_fidelity);
  report(4, "cluster-head election oracle", ch_election_oracle);
  report(5, "energy conservation", energy_conservation);

  const auto sweep_start = std::chrono::steady_clock::now();
  const Sweep sweep = Sweep::run();
  std::printf("       (sweep of 4 cells x %zu seeds x %u rounds took %.2f s)\n", kSeeds, kHorizon,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count());
  report(6, "delay ordering 4 < 2 < 0 relays", [&] { return delay_ordering(sweep); });
  report(7, "throughput ordering 4 > 2 > 0 relays", [&] { return throughput_ordering(sweep); });
  report(8, "inner-region energy below LEACH", [&] { return inner_energy(sweep); });
  report(9, "per-region first death not earlier than LEACH", [&] { return region_lifetime(sweep); });
  report(10, "alive nodes at checkpoints not fewer than LEACH", [&] { return alive_nodes(sweep); });
  report(11, "determinism", determinism);
  report(12, "baseline sanity", baseline_sanity);

  std::printf("%d of 12 criteria failed (%.2f s total)\n", failures,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return failures == 0 ? 0 : 1;
}
