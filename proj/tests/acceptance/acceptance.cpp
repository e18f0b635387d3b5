// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../unit/oracles.hpp"
#include "spinner/generators.hpp"
#include "spinner/graph.hpp"
#include "spinner/metrics.hpp"
#include "spinner/partition_map.hpp"
#include "spinner/partitioner.hpp"
#include "spinner/report_io.hpp"
#include "spinner/rng.hpp"
#include "spinner/tail_bound.hpp"

using namespace spinner;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double mean(const std::vector<double>& xs) { return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size()); }

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double mx = mean(lx), my = mean(ly);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Criteria 1, 2, 3 and 5 share one sweep over the 100k-vertex graph.

const std::vector<double> kSlacks = {1.02, 1.05, 1.10, 1.20};
const std::vector<std::size_t> kPartitions = {8, 16, 32, 64};
constexpr std::uint64_t kSeeds = 10;

struct SweepPoint {
  std::vector<double> rho;
  std::vector<double> phi;
  std::vector<double> iterations;
  std::size_t capped = 0;
};

struct Sweep {
  std::map<std::pair<double, std::size_t>, SweepPoint> points;
  double hash_phi = 0.0;
  std::uint64_t barriers_checked = 0;
  std::uint64_t load_mismatches = 0;
  std::uint64_t sum_mismatches = 0;
  double seconds = 0.0;
};

const Sweep& sweep() {
  static const Sweep result = [] {
    Sweep s;
    const auto start = std::chrono::steady_clock::now();
    const auto g = to_undirected(watts_strogatz({100000, 40, 0.3, 2024}));
    const auto total = static_cast<std::int64_t>(g.total_degree());
    s.hash_phi = quality(g, hash_baseline(g, 64), 64).phi;
    for (double c : kSlacks) {
      for (std::size_t k : kPartitions) {
        auto& point = s.points[{c, k}];
        for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
          SpinnerConfig config;
          config.k = k;
          config.c = c;
          config.seed = seed;
          RunOptions options;
          options.on_barrier = [&](const BarrierView& v) {
            if (v.phase == Phase::initialization) return;
            ++s.barriers_checked;
            const auto expected = oracle::loads(g, v.labels, k);
            if (!std::equal(expected.begin(), expected.end(), v.loads.begin(), v.loads.end())) ++s.load_mismatches;
            if (std::accumulate(v.loads.begin(), v.loads.end(), std::int64_t{0}) != total) ++s.sum_mismatches;
          };
          const auto r = partition(g, config, options);
          point.rho.push_back(r.final_stats().rho);
          point.phi.push_back(r.final_stats().phi);
          point.iterations.push_back(static_cast<double>(r.iterations));
          point.capped += r.halt == HaltReason::cap;
        }
        std::fprintf(stderr, "  sweep c=%.2f k=%zu: mean rho %.4f, mean iterations %.1f (%.0f s)\n", c, k,
                     mean(point.rho), mean(point.iterations), seconds_since(start));
      }
    }
    s.seconds = seconds_since(start);
    return s;
  }();
  return result;
}

Outcome balance_bound() {
  const auto& s = sweep();
  Outcome o;
  double worst_mean_gap = -1e9, worst_max_gap = -1e9;
  std::string where;
  for (const auto& [key, p] : s.points) {
    const double mean_gap = mean(p.rho) - key.first;
    const double max_gap = *std::max_element(p.rho.begin(), p.rho.end()) - key.first;
    if (mean_gap > 0 || max_gap > 0.03) {
      o.status = Status::fail;
      where += fmt(" [c=%.2f k=%zu mean %.4f max %.4f]", key.first, key.second, mean(p.rho),
                   *std::max_element(p.rho.begin(), p.rho.end()));
    }
    worst_mean_gap = std::max(worst_mean_gap, mean_gap);
    worst_max_gap = std::max(worst_max_gap, max_gap);
  }
  if (s.seconds > 600) o.status = Status::fail;
  o.detail = fmt("worst mean rho - c = %+.4f (limit 0), worst max rho - c = %+.4f (limit 0.03), %.0f s (limit 600)",
                 worst_mean_gap, worst_max_gap, s.seconds) +
             where;
  return o;
}

Outcome convergence_monotonicity() {
  const auto& s = sweep();
  std::vector<double> averages;
  for (double c : kSlacks) {
    std::vector<double> all;
    for (std::size_t k : kPartitions) {
      const auto& its = s.points.at({c, k}).iterations;
      all.insert(all.end(), its.begin(), its.end());
    }
    averages.push_back(mean(all));
  }
  std::size_t inversions = 0;
  bool large = false;
  for (std::size_t i = 1; i < averages.size(); ++i) {
    if (averages[i] > averages[i - 1]) {
      ++inversions;
      large = large || averages[i] - averages[i - 1] > 1.0;
    }
  }
  Outcome o;
  o.status = inversions <= 1 && !large ? Status::pass : Status::fail;
  o.detail = "mean iterations for c = 1.02, 1.05, 1.10, 1.20:";
  for (double a : averages) o.detail += fmt(" %.2f", a);
  o.detail += fmt(" (%zu inversions)", inversions);
  return o;
}

Outcome locality_vs_hash() {
  const auto& s = sweep();
  const double phi = mean(s.points.at({1.05, 64}).phi);
  const double ratio = phi / s.hash_phi;
  return {ratio >= 10 ? Status::pass : Status::fail,
          fmt("k=64 c=1.05: Spinner phi %.4f, hash phi %.4f, ratio %.1f (limit 10)", phi, s.hash_phi, ratio)};
}

Outcome load_bookkeeping() {
  const auto& s = sweep();
  const bool ok = s.load_mismatches == 0 && s.sum_mismatches == 0 && s.barriers_checked > 0;
  return {ok ? Status::pass : Status::fail,
          fmt("%llu barriers checked, %llu load mismatches, %llu load-sum mismatches",
              static_cast<unsigned long long>(s.barriers_checked), static_cast<unsigned long long>(s.load_mismatches),
              static_cast<unsigned long long>(s.sum_mismatches))};
}

// ---------------------------------------------------------------------------

Outcome score_oracle() {
  Rng gen(77);
  std::uint64_t evaluations = 0, mismatches = 0;
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 10 + gen.uniform_index(191);
    const std::size_t arcs = n + gen.uniform_index(4 * n);
    std::vector<DirectedEdge> raw;
    for (std::size_t i = 0; i < arcs; ++i) raw.push_back({gen.uniform_index(n), gen.uniform_index(n)});
    const auto g = to_undirected(DirectedEdgeList::from_raw(std::move(raw)));
    SpinnerConfig config;
    config.k = 2 + gen.uniform_index(15);
    config.seed = round;
    RunOptions options;
    options.on_score = [&](const ScoreTrace& t) {
      ++evaluations;
      const auto e = oracle::evaluate(t.neighbor_labels, t.weights, t.current, t.loads, t.capacity, *t.rng_before);
      bool ok = e.best == t.decision.best && e.candidate == t.decision.candidate && e.scores.size() == t.scores.size();
      for (std::size_t l = 0; ok && l < e.scores.size(); ++l) {
        ok = std::abs(e.scores[l] - t.scores[l]) <= 1e-12 * std::max(1.0, std::abs(e.scores[l]));
      }
      mismatches += !ok;
    };
    partition(g, config, options);
  }
  return {mismatches == 0 && evaluations > 0 ? Status::pass : Status::fail,
          fmt("50 graphs, %llu vertex evaluations, %llu mismatches", static_cast<unsigned long long>(evaluations),
              static_cast<unsigned long long>(mismatches))};
}

Outcome tail_bound() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> degrees(200);
  for (std::size_t i = 0; i < degrees.size(); ++i) degrees[i] = 1 + (499 * i + 99) / 199;
  const double load = std::accumulate(degrees.begin(), degrees.end(), 0.0);
  const auto report = verify_tail_bound(degrees, load / 2, 10000, 6);
  const auto at = [&](double eps) {
    return *std::find_if(report.points.begin(), report.points.end(),
                         [&](const TailBoundPoint& p) { return std::abs(p.epsilon - eps) < 1e-9; });
  };
  const bool spot = at(0.2).empirical <= 0.2 && at(0.4).empirical <= 0.0016 && at(0.2).stated_bound < 0.2 &&
                    at(0.4).stated_bound < 0.0016;
  bool grid = true, hoeffding = true;
  std::string rows;
  for (const auto& p : report.points) {
    grid = grid && p.stated_holds();
    hoeffding = hoeffding && p.hoeffding_holds();
    rows += fmt(" [eps %.1f: empirical %.4f, stated %.3g, Hoeffding %.3g]", p.epsilon, p.empirical, p.stated_bound,
                p.hoeffding_bound);
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.status = spot && grid && secs <= 30 ? Status::pass : Status::fail;
  o.detail = fmt("r = %.0f, p = %.2f; spot values %s; stated bound on grid %s; sum-Hoeffding on grid %s; %.1f s.",
                 report.remaining_capacity, report.probability, spot ? "hold" : "fail", grid ? "holds" : "fails",
                 hoeffding ? "holds" : "fails", secs) +
             rows;
  return o;
}

Outcome incremental() {
  const auto g = to_undirected(watts_strogatz({10000, 40, 0.3, 31}));
  Outcome o;
  double worst_ratio = 0, worst_diff = 0, least_scratch_diff = 1, worst_phi_gap = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SpinnerConfig config;
    config.k = 32;
    config.seed = seed;
    const auto first = partition(g, config);
    const auto previous = PartitionMap::from_labels(g, first.labels);
    const auto delta = delta_stream(g, 0.005, seed);
    const auto changed = apply_delta(g, delta);
    config.seed = seed + 100;
    const auto adapted = adapt(changed.graph, previous, changed.new_vertices, config);
    const auto scratch = partition(changed.graph, config);
    const double ratio = static_cast<double>(adapted.iterations) / static_cast<double>(scratch.iterations);
    const double diff = partitioning_difference(previous, PartitionMap::from_labels(changed.graph, adapted.labels));
    const double scratch_diff =
        partitioning_difference(previous, PartitionMap::from_labels(changed.graph, scratch.labels));
    const double phi_gap = std::abs(adapted.final_stats().phi - scratch.final_stats().phi);
    if (ratio > 0.5 || diff > 0.20 || scratch_diff < 0.80 || phi_gap > 0.03 || adapted.halt == HaltReason::cap) {
      o.status = Status::fail;
    }
    worst_ratio = std::max(worst_ratio, ratio);
    worst_diff = std::max(worst_diff, diff);
    least_scratch_diff = std::min(least_scratch_diff, scratch_diff);
    worst_phi_gap = std::max(worst_phi_gap, phi_gap);
  }
  o.detail = fmt("k=32, 5 seeds: worst adapt/scratch iterations %.2f (limit 0.5), difference %.3f (limit 0.20), "
                 "scratch difference %.3f (limit 0.80), phi gap %.4f (limit 0.03)",
                 worst_ratio, worst_diff, least_scratch_diff, worst_phi_gap);
  return o;
}

Outcome elastic_adaptation() {
  const auto g = to_undirected(watts_strogatz({10000, 40, 0.3, 32}));
  const auto n = static_cast<double>(g.num_vertices());
  Outcome o;

  SpinnerConfig config;
  config.k = 32;
  config.seed = 1;
  const auto first = partition(g, config);
  const auto previous = PartitionMap::from_labels(g, first.labels);
  config.k = 33;
  config.seed = 2;
  const auto grown = elastic(g, previous, 32, config);
  const double fraction = static_cast<double>(grown.initial_relabeled) / n;
  const double shuffle = partitioning_difference(first.labels, grown.labels);
  const double scratch = partitioning_difference(first.labels, partition(g, config).labels);
  if (std::abs(fraction - 1.0 / 33.0) > 0.01 || shuffle > 0.30 || scratch < 0.80) o.status = Status::fail;

  config.k = 4;
  config.seed = 3;
  const auto four = partition(g, config);
  std::size_t stranded = 0;
  RunOptions options;
  options.on_barrier = [&](const BarrierView& v) {
    if (v.phase == Phase::initialization) stranded = static_cast<std::size_t>(std::count(v.labels.begin(), v.labels.end(), Label{3}));
  };
  config.k = 3;
  const auto three = elastic(g, PartitionMap::from_labels(g, four.labels), 4, config, options);
  const auto moved = static_cast<std::size_t>(std::count(four.labels.begin(), four.labels.end(), Label{3}));
  const double rho = three.final_stats().rho;
  if (stranded != 0 || three.initial_relabeled != moved || rho > config.c + 0.03) o.status = Status::fail;

  o.detail = fmt("32->33: relabeled %.4f (target %.4f +- 0.01), shuffle %.3f (limit 0.30), scratch %.3f (limit 0.80); "
                 "4->3: %zu of %zu vertices on the removed label moved, %zu left, rho %.4f (limit %.2f)",
                 fraction, 1.0 / 33.0, shuffle, scratch, static_cast<std::size_t>(three.initial_relabeled), moved,
                 stranded, rho, config.c + 0.03);
  return o;
}

Outcome determinism() {
  const auto g = to_undirected(watts_strogatz({20000, 20, 0.3, 9}));
  std::vector<std::string> maps, reports;
  for (std::size_t workers : {1, 4}) {
    for (int rep = 0; rep < 2; ++rep) {
      SpinnerConfig config;
      config.k = 16;
      config.seed = 5;
      config.workers = workers;
      const auto r = partition(g, config);
      maps.push_back(format_partition_map(PartitionMap::from_labels(g, r.labels)));
      ReportContext context;
      context.graph_path = "ws.txt";
      reports.push_back(format_run_report(r, context));
    }
  }
  const bool ok = maps[0] == maps[1] && reports[0] == reports[1] && maps[2] == maps[3] && reports[2] == reports[3];
  return {ok ? Status::pass : Status::fail,
          fmt("workers 1 and 4, two runs each: maps %s, reports %s", maps[0] == maps[1] && maps[2] == maps[3] ? "identical" : "differ",
              reports[0] == reports[1] && reports[2] == reports[3] ? "identical" : "differ")};
}

double first_iteration_time(const Graph& g, std::size_t k, std::size_t workers, int repeat) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    SpinnerConfig config;
    config.k = k;
    config.workers = workers;
    config.max_iterations = 2;
    config.seed = 1 + static_cast<std::uint64_t>(i);
    best = std::min(best, partition(g, config).first_iteration_seconds);
  }
  return best;
}

Outcome scaling() {
  Outcome o;
  std::vector<double> sizes, size_times;
  for (int e = 18; e <= 23; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const auto g = to_undirected(watts_strogatz({n, 8, 0.3, 10}));
    sizes.push_back(static_cast<double>(n));
    size_times.push_back(first_iteration_time(g, 32, 1, 3));
    std::fprintf(stderr, "  size 2^%d: %.4f s\n", e, size_times.back());
  }
  const double size_slope = loglog_slope(sizes, size_times);

  std::vector<double> ks, k_times;
  {
    const auto g = to_undirected(watts_strogatz({std::size_t{1} << 18, 8, 0.3, 11}));
    for (std::size_t k = 2; k <= 256; k *= 2) {
      ks.push_back(static_cast<double>(k));
      k_times.push_back(first_iteration_time(g, k, 1, 3));
      std::fprintf(stderr, "  k %zu: %.4f s\n", k, k_times.back());
    }
  }
  const double k_slope = loglog_slope(ks, k_times);
  if (size_slope < 0.8 || size_slope > 1.2 || k_slope < 0.8 || k_slope > 1.2) o.status = Status::fail;
  o.detail = fmt("slope vs |V| %.3f, slope vs k %.3f (both limited to [0.8, 1.2]); ", size_slope, k_slope);

  const unsigned cores = std::thread::hardware_concurrency();
  if (cores < 4) {
    o.detail += fmt("worker speedup not measured: %u hardware threads, needs 4 or more", cores);
    if (o.status == Status::pass) o.status = Status::skip;
  } else {
    const auto g = to_undirected(watts_strogatz({std::size_t{1} << 20, 8, 0.3, 12}));
    const double one = first_iteration_time(g, 32, 1, 3);
    const double eight = first_iteration_time(g, 32, 8, 3);
    const double speedup = one / eight;
    if (speedup < 3) o.status = Status::fail;
    o.detail += fmt("speedup 1 -> 8 workers %.2fx on %u hardware threads (limit 3x)", speedup, cores);
  }
  return o;
}

Outcome degenerate() {
  std::vector<std::string> problems;
  const auto expect = [&](bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  };
  try {
    const auto g = to_undirected(watts_strogatz({1000, 6, 0.3, 1}));
    SpinnerConfig config;
    config.k = 1;
    const auto r = partition(g, config);
    expect(r.final_stats().phi == 1.0 && r.final_stats().rho == 1.0, "k=1 quality");
    expect(r.iterations <= config.window + 1, "k=1 iterations");
  } catch (const std::exception& e) {
    problems.push_back(std::string("k=1: ") + e.what());
  }
  try {
    const auto r = partition(Graph{}, SpinnerConfig{});
    expect(r.labels.empty(), "empty graph labels");
  } catch (const std::exception& e) {
    problems.push_back(std::string("empty graph: ") + e.what());
  }
  try {
    auto list = DirectedEdgeList::from_raw({{1, 2}, {2, 3}});
    list.isolated_vertices = {10, 11, 12};
    const auto g = to_undirected(list);
    SpinnerConfig config;
    config.k = 2;
    const auto r = partition(g, config);
    expect(r.labels.size() == 6 && r.halt == HaltReason::converged, "isolated vertices");
  } catch (const std::exception& e) {
    problems.push_back(std::string("isolated vertices: ") + e.what());
  }
  try {
    const auto g = to_undirected(DirectedEdgeList::from_raw({{1, 2}, {2, 3}, {3, 1}}));
    SpinnerConfig config;
    config.k = 8;
    const auto r = partition(g, config);
    expect(r.labels.size() == 3 && !r.warnings.empty(), "graph smaller than k");
  } catch (const std::exception& e) {
    problems.push_back(std::string("graph smaller than k: ") + e.what());
  }
  Outcome o;
  o.status = problems.empty() ? Status::pass : Status::fail;
  o.detail = "k=1, empty graph, isolated vertices, graph smaller than k";
  for (const auto& p : problems) o.detail += "; failed: " + p;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, balance_bound},   {2, convergence_monotonicity}, {3, locality_vs_hash}, {4, score_oracle},
      {5, load_bookkeeping}, {6, tail_bound},               {7, incremental},      {8, elastic_adaptation},
      {9, determinism},     {10, scaling},                 {11, degenerate},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [number, check] : criteria) {
    if (!wanted.empty() && !wanted.count(number)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("exception: ") + e.what()};
    }
    const char* label = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("criterion %2d: %s  %s\n", number, label, o.detail.c_str());
    std::fflush(stdout);
    failures += o.status == Status::fail;
  }
  return failures == 0 ? 0 : 1;
}
