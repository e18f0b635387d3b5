#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "spinner/edge_list_io.hpp"
#include "spinner/generators.hpp"
#include "spinner/metrics.hpp"
#include "spinner/partition_map.hpp"
#include "spinner/partitioner.hpp"
#include "spinner/report_io.hpp"
#include "spinner/tail_bound.hpp"

namespace spinner::cli {

namespace {

struct InputOptions {
  std::string graph;
  bool undirected = false;
  bool binary = false;

  EdgeListReadOptions read_options() const {
    EdgeListReadOptions o;
    o.undirected = undirected;
    o.format = binary ? EdgeListFormat::binary : EdgeListFormat::text;
    return o;
  }
};

struct OutputOptions {
  std::string out;
  std::string report;
  std::string csv;
  bool timings = false;
};

struct Loaded {
  Graph graph;
  ReportContext context;
};

void add_input(CLI::App* app, InputOptions& in) {
  app->add_option("--graph", in.graph, "Edge list file")->required();
  app->add_flag("--undirected", in.undirected, "Treat each line as an undirected pair");
  app->add_flag("--binary", in.binary, "Edge list holds little-endian u64 pairs");
}

// `k_help` null leaves --k to the caller.
void add_config(CLI::App* app, SpinnerConfig& config, const char* k_help) {
  if (k_help) app->add_option("--k", config.k, k_help)->capture_default_str();
  app->add_option("--c", config.c, "Capacity slack")->capture_default_str();
  app->add_option("--epsilon", config.epsilon, "Halting threshold")->capture_default_str();
  app->add_option("--window", config.window, "Halting window")->capture_default_str();
  app->add_option("--workers", config.workers, "Worker threads")->capture_default_str();
  app->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  app->add_option("--max-iters", config.max_iterations, "Iteration cap")->capture_default_str();
}

void add_output(CLI::App* app, OutputOptions& o) {
  app->add_option("--out", o.out, "Partition map output (stdout when omitted)");
  app->add_option("--report", o.report, "JSON run report output");
  app->add_option("--csv", o.csv, "CSV series output");
  app->add_flag("--timings", o.timings, "Include wall times in reports");
}

Loaded load(const InputOptions& in) {
  Loaded l;
  const auto edges = load_edge_list(in.graph, in.read_options());
  l.graph = to_undirected(edges);
  l.context.graph_path = in.graph;
  l.context.self_loops_dropped = edges.self_loops_dropped;
  l.context.duplicates_dropped = edges.duplicates_dropped;
  return l;
}

void describe(ReportContext& context, const Graph& graph) {
  context.vertices = graph.num_vertices();
  context.edges = graph.num_edges();
  context.total_weight = graph.total_weight();
}

void log_graph(std::ostream& err, const Graph& graph, const ReportContext& context) {
  err << "spinner: " << graph.num_vertices() << " vertices, " << graph.num_edges() << " edges (weight "
      << graph.total_weight() << ")";
  if (context.self_loops_dropped || context.duplicates_dropped) {
    err << ", dropped " << context.self_loops_dropped << " self-loops and " << context.duplicates_dropped
        << " duplicates";
  }
  err << '\n';
}

int finish(const Graph& graph, const RunReport& report, ReportContext context, const OutputOptions& o,
           std::ostream& out, std::ostream& err) {
  for (const auto& w : report.warnings) err << "spinner: warning: " << w << '\n';
  const auto map = PartitionMap::from_labels(graph, report.labels);
  if (o.out.empty()) {
    out << format_partition_map(map);
  } else {
    write_partition_map(o.out, map);
    context.partition_path = o.out;
  }
  context.timings = o.timings;
  if (!o.report.empty()) write_text_file(o.report, format_run_report(report, context));
  if (!o.csv.empty()) write_text_file(o.csv, format_series_csv(report, o.timings));
  if (!report.series.empty()) {
    const auto& s = report.final_stats();
    err << "spinner: " << to_string(report.halt) << " after " << report.iterations << " iterations, phi=" << s.phi
        << " rho=" << s.rho << '\n';
  }
  return report.halt == HaltReason::cap ? kCapHalted : kSuccess;
}

void compare_with_scratch(const Graph& graph, const SpinnerConfig& config, const PartitionMap& previous,
                          ReportContext& context) {
  const auto scratch = partition(graph, config);
  context.scratch_iterations = scratch.iterations;
  context.scratch_difference = partitioning_difference(previous, PartitionMap::from_labels(graph, scratch.labels));
  if (!scratch.series.empty()) context.scratch_phi = scratch.final_stats().phi;
}

std::vector<std::size_t> powers_of_two(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (std::size_t x = lo; x <= hi; x *= 2) v.push_back(x);
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Balanced k-way graph partitioning by label propagation"};
  app.name("spinner");
  app.require_subcommand(1);
  std::function<int()> action;

  // partition
  InputOptions p_in;
  SpinnerConfig p_config;
  OutputOptions p_out;
  auto* p = app.add_subcommand("partition", "Partition a graph from scratch");
  add_input(p, p_in);
  add_config(p, p_config, "Number of partitions");
  add_output(p, p_out);
  p->callback([&] {
    action = [&] {
      auto l = load(p_in);
      describe(l.context, l.graph);
      log_graph(err, l.graph, l.context);
      const auto report = partition(l.graph, p_config);
      return finish(l.graph, report, l.context, p_out, out, err);
    };
  });

  // adapt
  InputOptions a_in;
  std::string a_delta, a_previous;
  SpinnerConfig a_config;
  OutputOptions a_out;
  bool a_compare = false;
  auto* a = app.add_subcommand("adapt", "Repartition after edges were added");
  add_input(a, a_in);
  a->add_option("--delta", a_delta, "Edge list of added edges")->required();
  a->add_option("--previous", a_previous, "Previous partition map")->required();
  auto* a_k = a->add_option("--k", a_config.k, "Number of partitions (default: from the previous map)");
  add_config(a, a_config, nullptr);
  a->add_flag("--compare-scratch", a_compare, "Also partition from scratch and report the difference");
  add_output(a, a_out);
  a->callback([&] {
    action = [&] {
      auto l = load(a_in);
      const auto delta = load_delta(a_delta, a_in.read_options().format);
      auto applied = apply_delta(l.graph, delta);
      const auto previous = read_partition_map(a_previous);
      if (a_k->count() == 0) a_config.k = std::max<std::size_t>(1, previous.label_bound());
      describe(l.context, applied.graph);
      log_graph(err, applied.graph, l.context);
      err << "spinner: delta adds " << delta.added.size() << " edges, " << applied.new_vertices.size()
          << " new vertices\n";
      const auto report = adapt(applied.graph, previous, applied.new_vertices, a_config);
      l.context.new_vertices = applied.new_vertices.size();
      l.context.difference_vs_previous =
          partitioning_difference(previous, PartitionMap::from_labels(applied.graph, report.labels));
      if (a_compare) compare_with_scratch(applied.graph, a_config, previous, l.context);
      return finish(applied.graph, report, l.context, a_out, out, err);
    };
  });

  // elastic
  InputOptions e_in;
  std::string e_previous;
  std::size_t e_new_k = 0;
  SpinnerConfig e_config;
  OutputOptions e_out;
  bool e_compare = false;
  auto* e = app.add_subcommand("elastic", "Change the number of partitions");
  add_input(e, e_in);
  e->add_option("--previous", e_previous, "Previous partition map")->required();
  std::size_t e_old_k = 0;
  auto* e_k = e->add_option("--k", e_old_k, "Previous number of partitions (default: from the previous map)");
  e->add_option("--new-k", e_new_k, "New number of partitions")->required();
  add_config(e, e_config, nullptr);
  e->add_flag("--compare-scratch", e_compare, "Also partition from scratch and report the difference");
  add_output(e, e_out);
  e->callback([&] {
    action = [&] {
      auto l = load(e_in);
      describe(l.context, l.graph);
      log_graph(err, l.graph, l.context);
      const auto previous = read_partition_map(e_previous);
      if (e_k->count() == 0) e_old_k = std::max<std::size_t>(1, previous.label_bound());
      if (e_new_k == 0) throw ConfigError("new k must be at least 1");
      e_config.k = e_new_k;
      const auto report = elastic(l.graph, previous, e_old_k, e_config);
      err << "spinner: relabeled " << report.initial_relabeled << " vertices going from k=" << e_old_k
          << " to k=" << e_new_k << '\n';
      l.context.difference_vs_previous =
          partitioning_difference(previous, PartitionMap::from_labels(l.graph, report.labels));
      if (e_compare) compare_with_scratch(l.graph, e_config, previous, l.context);
      return finish(l.graph, report, l.context, e_out, out, err);
    };
  });

  // generate
  auto* g = app.add_subcommand("generate", "Generate synthetic inputs");
  g->require_subcommand(1);
  WattsStrogatzSpec ws;
  std::string ws_out;
  bool ws_binary = false;
  auto* gws = g->add_subcommand("ws", "Watts-Strogatz small-world graph");
  gws->add_option("--n", ws.n, "Vertices")->required();
  gws->add_option("--d", ws.d, "Out-edges per vertex")->capture_default_str();
  gws->add_option("--beta", ws.beta, "Rewiring probability")->capture_default_str();
  gws->add_option("--seed", ws.seed, "Random seed")->capture_default_str();
  gws->add_option("--out", ws_out, "Output edge list")->required();
  gws->add_flag("--binary", ws_binary, "Write little-endian u64 pairs");
  gws->callback([&] {
    action = [&] {
      const auto edges = watts_strogatz(ws);
      write_edge_list(ws_out, edges, ws_binary ? EdgeListFormat::binary : EdgeListFormat::text);
      err << "spinner: wrote " << edges.edges.size() << " edges to " << ws_out << '\n';
      return int{kSuccess};
    };
  });
  InputOptions gd_in;
  double gd_fraction = 0.005;
  std::uint64_t gd_seed = 0;
  std::string gd_out;
  auto* gd = g->add_subcommand("delta", "Random new edges for an existing graph");
  add_input(gd, gd_in);
  gd->add_option("--fraction", gd_fraction, "New edges as a fraction of existing edges")->capture_default_str();
  gd->add_option("--seed", gd_seed, "Random seed")->capture_default_str();
  gd->add_option("--out", gd_out, "Output edge list")->required();
  gd->callback([&] {
    action = [&] {
      auto l = load(gd_in);
      const auto delta = delta_stream(l.graph, gd_fraction, gd_seed);
      DirectedEdgeList list;
      list.edges = delta.added;
      write_edge_list(gd_out, list);
      err << "spinner: wrote " << list.edges.size() << " edges to " << gd_out << '\n';
      return int{kSuccess};
    };
  });

  // metrics
  InputOptions m_in;
  std::string m_assignment, m_compare, m_hash, m_report;
  std::size_t m_k = 0;
  auto* m = app.add_subcommand("metrics", "Quality of an assignment");
  add_input(m, m_in);
  auto* m_assign_opt = m->add_option("--assignment", m_assignment, "Partition map");
  auto* m_hash_opt = m->add_option("--hash", m_hash, "Evaluate hash partitioning instead (mix or identity)")
                         ->check(CLI::IsMember({"mix", "identity"}));
  m_assign_opt->excludes(m_hash_opt);
  auto* m_k_opt = m->add_option("--k", m_k, "Number of partitions (default: from the map)");
  m->add_option("--compare", m_compare, "Second partition map for the partitioning difference");
  m->add_option("--report", m_report, "Write JSON here instead of stdout");
  m->callback([&] {
    action = [&] {
      auto l = load(m_in);
      std::vector<Label> labels;
      PartitionMap map;
      if (!m_hash.empty()) {
        if (m_k_opt->count() == 0) throw ConfigError("--hash needs --k");
        labels = hash_baseline(l.graph, m_k, m_hash == "mix" ? HashKind::mix : HashKind::identity);
        map = PartitionMap::from_labels(l.graph, labels);
      } else {
        if (m_assignment.empty()) throw ConfigError("one of --assignment or --hash is required");
        map = read_partition_map(m_assignment);
        labels.resize(l.graph.num_vertices());
        for (VertexIndex v = 0; v < l.graph.num_vertices(); ++v) {
          auto label = map.find(l.graph.id(v));
          if (!label) throw InputError("vertex " + std::to_string(l.graph.id(v)) + " has no assignment");
          labels[v] = *label;
        }
        if (m_k_opt->count() == 0) m_k = std::max<std::size_t>(1, map.label_bound());
      }
      const auto q = quality(l.graph, labels, m_k);
      const auto cut = cut_message_count(l.graph, labels);
      nlohmann::ordered_json doc;
      doc["schema_version"] = kReportSchemaVersion;
      doc["k"] = m_k;
      doc["phi"] = q.phi;
      doc["directed_phi"] = q.directed_phi;
      doc["rho"] = q.rho;
      doc["local_edges"] = q.local_edges;
      doc["total_edges"] = q.total_edges;
      doc["max_load"] = q.max_load;
      doc["cut_messages"] = cut.total;
      nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
      for (const auto& [key, count] : cut.by_pair) pairs.push_back({key.first, key.second, count});
      doc["cut_messages_by_pair"] = pairs;
      if (!m_compare.empty()) doc["difference"] = partitioning_difference(map, read_partition_map(m_compare));
      const std::string text = doc.dump(2) + "\n";
      if (m_report.empty()) {
        out << text;
      } else {
        write_text_file(m_report, text);
      }
      return int{kSuccess};
    };
  });

  // bench
  std::string b_suite = "all";
  std::vector<std::size_t> b_sizes, b_workers, b_ks;
  std::size_t b_n = 1 << 18, b_d = 8, b_k = 32, b_repeat = 1;
  std::uint64_t b_seed = 0;
  std::string b_csv;
  auto* b = app.add_subcommand("bench", "Time the first iteration across graph sizes, workers and k");
  b->add_option("--suite", b_suite, "size, workers, k or all")
      ->check(CLI::IsMember({"size", "workers", "k", "all"}))
      ->capture_default_str();
  b->add_option("--sizes", b_sizes, "Vertex counts (default 2^14 .. 2^18)");
  b->add_option("--workers-grid", b_workers, "Worker counts (default 1 2 4 8)");
  b->add_option("--k-grid", b_ks, "Partition counts (default 2 .. 256)");
  b->add_option("--n", b_n, "Vertices for the workers and k suites")->capture_default_str();
  b->add_option("--d", b_d, "Out-edges per vertex of the generated graphs")->capture_default_str();
  b->add_option("--k", b_k, "Partitions for the size and workers suites")->capture_default_str();
  b->add_option("--repeat", b_repeat, "Runs per point; the fastest is kept")->capture_default_str();
  b->add_option("--seed", b_seed, "Random seed")->capture_default_str();
  b->add_option("--csv", b_csv, "Write CSV here instead of stdout");
  b->callback([&] {
    action = [&] {
      if (b_sizes.empty()) b_sizes = powers_of_two(1 << 14, 1 << 18);
      if (b_workers.empty()) b_workers = {1, 2, 4, 8};
      if (b_ks.empty()) b_ks = powers_of_two(2, 256);
      std::ostringstream csv;
      csv << "suite,vertices,edges,k,workers,first_iteration_seconds\n";
      auto measure = [&](const std::string& suite, const Graph& graph, std::size_t k, std::size_t workers) {
        SpinnerConfig config;
        config.k = k;
        config.workers = workers;
        config.seed = b_seed;
        config.max_iterations = 2;
        double best = 0.0;
        for (std::size_t r = 0; r < std::max<std::size_t>(1, b_repeat); ++r) {
          const double t = partition(graph, config).first_iteration_seconds;
          if (r == 0 || t < best) best = t;
        }
        csv << suite << ',' << graph.num_vertices() << ',' << graph.num_edges() << ',' << k << ',' << workers << ','
            << best << '\n';
        err << "spinner: " << suite << " n=" << graph.num_vertices() << " k=" << k << " workers=" << workers << ": "
            << best << " s\n";
      };
      auto make = [&](std::size_t n) { return to_undirected(watts_strogatz({n, b_d, 0.3, b_seed})); };
      if (b_suite == "size" || b_suite == "all") {
        for (std::size_t n : b_sizes) measure("size", make(n), b_k, 1);
      }
      if (b_suite == "workers" || b_suite == "all") {
        const auto graph = make(b_n);
        for (std::size_t w : b_workers) measure("workers", graph, b_k, w);
      }
      if (b_suite == "k" || b_suite == "all") {
        const auto graph = make(b_n);
        for (std::size_t k : b_ks) measure("k", graph, k, 1);
      }
      if (b_csv.empty()) {
        out << csv.str();
      } else {
        write_text_file(b_csv, csv.str());
      }
      return int{kSuccess};
    };
  });

  // verify-bound
  std::size_t v_candidates = 200;
  std::uint64_t v_min = 1, v_max = 500, v_trials = 10000, v_seed = 0;
  double v_r = 0.0;
  std::vector<double> v_eps = kDefaultEpsilonGrid;
  auto* vb = app.add_subcommand("verify-bound", "Monte-Carlo check of the capacity overflow bound");
  vb->add_option("--candidates", v_candidates, "Candidates migrating to the partition")->capture_default_str();
  vb->add_option("--min-degree", v_min, "Smallest candidate degree")->capture_default_str();
  vb->add_option("--max-degree", v_max, "Largest candidate degree; degrees are evenly spaced")
      ->capture_default_str();
  vb->add_option("--r", v_r, "Remaining capacity (default: half the candidate load)");
  vb->add_option("--trials", v_trials, "Monte-Carlo trials")->capture_default_str();
  vb->add_option("--seed", v_seed, "Random seed")->capture_default_str();
  vb->add_option("--epsilons", v_eps, "Overflow factors");
  vb->callback([&] {
    action = [&] {
      if (v_candidates == 0) throw ConfigError("candidates must be at least 1");
      if (v_min == 0 || v_max < v_min) throw ConfigError("need 1 <= min-degree <= max-degree");
      std::vector<std::uint64_t> degrees(v_candidates);
      double load = 0.0;
      for (std::size_t i = 0; i < v_candidates; ++i) {
        const double t = v_candidates == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(v_candidates - 1);
        degrees[i] = static_cast<std::uint64_t>(std::llround(static_cast<double>(v_min) +
                                                             t * static_cast<double>(v_max - v_min)));
        load += static_cast<double>(degrees[i]);
      }
      const double r = v_r > 0.0 ? v_r : load / 2.0;
      const auto report = verify_tail_bound(degrees, r, v_trials, v_seed, v_eps);
      err << "spinner: " << report.candidates << " candidates, load " << report.candidate_load << ", r=" << r
          << ", p=" << report.probability << '\n';
      out << "epsilon,overflows,empirical,stated_bound,hoeffding_bound,exact,stated_holds,hoeffding_holds\n";
      for (const auto& pt : report.points) {
        out << pt.epsilon << ',' << pt.overflows << ',' << pt.empirical << ',' << pt.stated_bound << ','
            << pt.hoeffding_bound << ',' << (pt.exact ? std::to_string(*pt.exact) : "") << ','
            << (pt.stated_holds() ? "yes" : "no") << ',' << (pt.hoeffding_holds() ? "yes" : "no") << '\n';
      }
      return int{kSuccess};
    };
  });

  std::vector<const char*> argv{"spinner"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    return action();
  } catch (const Error& ex) {
    err << "spinner: error: " << ex.what() << '\n';
    return kUsageError;
  }
}

}  // namespace spinner::cli
