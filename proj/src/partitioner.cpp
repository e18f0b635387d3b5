#include "spinner/partitioner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "spinner/bsp/engine.hpp"

namespace spinner {

void SpinnerConfig::validate() const {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (k >= kNoLabel) throw ConfigError("k is too large");
  if (!(c > 1.0)) throw ConfigError("c must be greater than 1");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (window == 0) throw ConfigError("window must be at least 1");
  if (max_iterations == 0) throw ConfigError("max_iterations must be at least 1");
  if (workers == 0) throw ConfigError("workers must be at least 1");
}

std::string to_string(HaltReason reason) { return reason == HaltReason::converged ? "converged" : "cap"; }

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::scratch: return "scratch";
    case RunMode::adapt: return "adapt";
    case RunMode::elastic: return "elastic";
  }
  return "unknown";
}

bool HaltingTracker::update(double score, bool repeats_earlier_state) {
  if (!has_previous_) {
    has_previous_ = true;
    previous_ = score;
    return false;
  }
  const double improvement = score - previous_;
  if (repeats_earlier_state || improvement <= epsilon_ * std::abs(previous_)) {
    ++idle_;
  } else {
    idle_ = 0;
  }
  previous_ = score;
  return idle_ >= window_;
}

std::vector<std::int64_t> compute_loads(const Graph& graph, std::span<const Label> labels, std::size_t k) {
  std::vector<std::int64_t> loads(k, 0);
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    loads[labels[v]] += static_cast<std::int64_t>(graph.degree(v));
  }
  return loads;
}

double global_score(const Graph& graph, std::span<const Label> labels, std::size_t k, double c) {
  const auto loads = compute_loads(graph, labels, k);
  const double capacity = partition_capacity(c, graph.total_degree(), k);
  double score = 0.0;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    const Label own = labels[v];
    if (graph.degree(v) > 0) {
      std::uint64_t same = 0;
      auto row = graph.neighbors(v);
      auto w = graph.weights(v);
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (labels[row[i]] == own) same += w[i];
      }
      score += static_cast<double>(same) / static_cast<double>(graph.degree(v));
    }
    if (capacity > 0.0) score -= static_cast<double>(loads[own]) / capacity;
  }
  return score;
}

namespace {

// Per (vertex, label) key of the labeling hash: the hash of a labeling is the
// wrapping sum of the keys of all its (vertex, label) pairs.
std::uint64_t state_key(VertexIndex v, Label label) {
  std::uint64_t x = (static_cast<std::uint64_t>(v) << 32) ^ label;
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct InitPlan {
  RunMode mode = RunMode::scratch;
  /// Starting labels for adapt and elastic runs.
  std::vector<Label> labels;
  std::size_t previous_k = 0;
  std::uint64_t placed = 0;
};

struct SpinnerScratch {
  WorkerLoadView loads;
  LabelScorer scorer;
  std::vector<double> probability;
};

/// The vertex program: superstep 0 initializes labels, then odd supersteps
/// run ComputeScores and even supersteps run ComputeMigrations.
class SpinnerProgram {
 public:
  using Message = Label;
  using WorkerScratch = SpinnerScratch;
  using Context = bsp::WorkerContext<SpinnerProgram>;

  SpinnerProgram(const Graph& graph, const SpinnerConfig& config, InitPlan plan, const RunOptions& options)
      : graph_(graph),
        config_(config),
        plan_(std::move(plan)),
        options_(options),
        capacity_(partition_capacity(config.c, graph.total_degree(), config.k)),
        labels_(graph.num_vertices(), kNoLabel),
        target_(graph.num_vertices(), kNoLabel),
        gain_(graph.num_vertices(), 0),
        cache_(graph.num_entries(), kNoLabel),
        tracker_(config.epsilon, config.window) {
    report_.config = config;
    report_.mode = plan_.mode;
    report_.previous_k = plan_.mode == RunMode::scratch ? config.k : plan_.previous_k;
    report_.initial_relabeled = plan_.placed;
  }

  void register_aggregators(bsp::AggregatorRegistry& registry) {
    using bsp::AggregatorMode;
    const std::size_t k = config_.k;
    loads_ = registry.add<std::int64_t>("partition-load", k, AggregatorMode::persistent);
    counts_ = registry.add<std::int64_t>("partition-vertices", k, AggregatorMode::persistent);
    candidate_load_ = registry.add<std::int64_t>("candidate-load", k, AggregatorMode::reset);
    migrations_ = registry.add<std::int64_t>("migrations", 1, AggregatorMode::reset);
    candidates_ = registry.add<std::int64_t>("candidates", 1, AggregatorMode::reset);
    local_weight_ = registry.add<std::int64_t>("local-weight", 1, AggregatorMode::reset);
    relabeled_ = registry.add<std::int64_t>("relabeled", 1, AggregatorMode::reset);
    locality_ = registry.add<double>("locality", 1, AggregatorMode::persistent);
    locality_full_ = registry.add<double>("locality-recomputed", 1, AggregatorMode::reset);
    state_hash_ = registry.add<std::uint64_t>("labeling-hash", 1, AggregatorMode::persistent);
  }

  void begin_superstep(Context& ctx) {
    auto& scratch = ctx.scratch();
    switch (phase_of(ctx.superstep())) {
      case Phase::initialization:
        break;
      case Phase::compute_scores:
        if (scratch.scorer.k() != config_.k) scratch.scorer.resize(config_.k);
        scratch.loads.reset(ctx.aggregated(loads_));
        break;
      case Phase::compute_migrations: {
        // Probabilities depend only on barrier values, so each worker derives
        // them once per superstep.
        auto loads = ctx.aggregated(loads_);
        auto wanted = ctx.aggregated(candidate_load_);
        scratch.probability.resize(config_.k);
        for (std::size_t l = 0; l < config_.k; ++l) {
          scratch.probability[l] = migration_probability(capacity_ - static_cast<double>(loads[l]), wanted[l]);
        }
        break;
      }
    }
  }

  void compute(Context& ctx, VertexIndex v) {
    switch (phase_of(ctx.superstep())) {
      case Phase::initialization: initialize(ctx, v); break;
      case Phase::compute_scores: compute_scores(ctx, v); break;
      case Phase::compute_migrations: compute_migrations(ctx, v); break;
    }
  }

  bool master(bsp::MasterContext& master) {
    const Phase phase = phase_of(master.superstep());
    superstep_seconds_.push_back(master.superstep_seconds());
    bool proceed = true;
    if (phase == Phase::initialization) {
      report_.initial_relabeled += static_cast<std::uint64_t>(master.aggregated(relabeled_)[0]);
    } else if (phase == Phase::compute_scores) {
      proceed = evaluate_iteration(master);
    } else {
      pending_migrations_ = static_cast<std::uint64_t>(master.aggregated(migrations_)[0]);
    }
    if (options_.on_barrier) {
      BarrierView view;
      view.superstep = master.superstep();
      view.phase = phase;
      view.labels = labels_;
      view.loads = master.aggregated(loads_);
      view.vertex_counts = master.aggregated(counts_);
      options_.on_barrier(view);
    }
    if (!proceed) {
      auto loads = master.aggregated(loads_);
      report_.loads.assign(loads.begin(), loads.end());
    }
    return proceed;
  }

  RunReport finish(const bsp::EngineStats& stats, double total_seconds) {
    report_.iterations = report_.series.size();
    report_.labels = std::move(labels_);
    report_.supersteps = stats.supersteps;
    report_.total_seconds = total_seconds;
    if (stats.capped) report_.halt = HaltReason::cap;
    const auto& s = stats.superstep_seconds;
    if (s.size() > 1) report_.first_iteration_seconds = s[1] + (s.size() > 2 ? s[2] : 0.0);
    return std::move(report_);
  }

 private:
  static Phase phase_of(std::size_t superstep) {
    if (superstep == 0) return Phase::initialization;
    return superstep % 2 == 1 ? Phase::compute_scores : Phase::compute_migrations;
  }

  bool recompute_locality(std::size_t iteration) const {
    if (options_.verify_score) return true;
    const std::size_t every = config_.score_resync_interval;
    return every > 0 && iteration > 0 && iteration % every == 0;
  }

  void announce(Context& ctx, VertexIndex v, Label label) {
    for (VertexIndex u : graph_.neighbors(v)) ctx.send(v, u, label);
  }

  void initialize(Context& ctx, VertexIndex v) {
    Label label = kNoLabel;
    switch (plan_.mode) {
      case RunMode::scratch:
        label = static_cast<Label>(ctx.rng().uniform_index(config_.k));
        break;
      case RunMode::adapt:
        label = plan_.labels[v];
        break;
      case RunMode::elastic: {
        label = plan_.labels[v];
        const std::size_t old_k = plan_.previous_k;
        const std::size_t new_k = config_.k;
        if (new_k > old_k) {
          const std::size_t added = new_k - old_k;
          if (ctx.rng().bernoulli(static_cast<double>(added) / static_cast<double>(new_k))) {
            label = static_cast<Label>(old_k + ctx.rng().uniform_index(added));
          }
        } else if (label >= new_k) {
          label = static_cast<Label>(ctx.rng().uniform_index(new_k));
        }
        if (label != plan_.labels[v]) ctx.aggregate(relabeled_, 0, std::int64_t{1});
        break;
      }
    }
    labels_[v] = label;
    ctx.aggregate(state_hash_, 0, state_key(v, label));
    ctx.aggregate(loads_, label, static_cast<std::int64_t>(graph_.degree(v)));
    ctx.aggregate(counts_, label, std::int64_t{1});
    announce(ctx, v, label);
  }

  void compute_scores(Context& ctx, VertexIndex v) {
    auto& scratch = ctx.scratch();
    const auto row = graph_.neighbors(v);
    const auto weights = graph_.weights(v);
    Label* cache = cache_.data() + graph_.entry_offset(v);
    const Label current = labels_[v];
    const std::uint64_t degree = graph_.degree(v);
    target_[v] = kNoLabel;
    if (degree == 0) return;

    // Refresh cached neighbor labels. The locality term of this vertex
    // changes for every neighbor that left or joined its label.
    std::int64_t locality_change = 0;
    for (const auto& message : ctx.inbox(v)) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(row.begin(), row.end(), message.source) - row.begin());
      const int before = cache[pos] == current;
      const int after = message.payload == current;
      locality_change += static_cast<std::int64_t>(after - before) * weights[pos];
      cache[pos] = message.payload;
    }
    const double inv_degree = 1.0 / static_cast<double>(degree);
    if (locality_change != 0) {
      ctx.aggregate(locality_, 0, static_cast<double>(locality_change) * inv_degree);
    }

    std::span<const Label> neighbor_labels(cache, row.size());
    ScoreDecision decision;
    if (options_.on_score) {
      const Rng before = ctx.rng();
      std::vector<std::int64_t> loads(scratch.loads.loads().begin(), scratch.loads.loads().end());
      decision = scratch.scorer.evaluate(neighbor_labels, weights, current, loads, capacity_, ctx.rng());
      ScoreTrace trace;
      trace.vertex = v;
      trace.current = current;
      trace.neighbor_labels = neighbor_labels;
      trace.weights = weights;
      trace.loads = loads;
      trace.capacity = capacity_;
      trace.rng_before = &before;
      trace.decision = decision;
      trace.scores = scratch.scorer.scores();
      options_.on_score(trace);
    } else {
      decision =
          scratch.scorer.evaluate(neighbor_labels, weights, current, scratch.loads.loads(), capacity_, ctx.rng());
    }

    const std::uint64_t own_weight = scratch.scorer.neighbor_weight(current);
    ctx.aggregate(local_weight_, 0, static_cast<std::int64_t>(own_weight));
    if (recompute_locality(iteration_)) {
      ctx.aggregate(locality_full_, 0, static_cast<double>(own_weight) * inv_degree);
    }

    if (decision.candidate) {
      const auto d = static_cast<std::int64_t>(degree);
      target_[v] = decision.best;
      gain_[v] = static_cast<std::int64_t>(scratch.scorer.neighbor_weight(decision.best)) -
                 static_cast<std::int64_t>(own_weight);
      // Later vertices on this worker see the tentative move.
      scratch.loads.update(decision.best, d);
      scratch.loads.update(current, -d);
      ctx.aggregate(candidate_load_, decision.best, d);
      ctx.aggregate(candidates_, 0, std::int64_t{1});
    }
  }

  void compute_migrations(Context& ctx, VertexIndex v) {
    const Label target = target_[v];
    if (target == kNoLabel) return;
    target_[v] = kNoLabel;
    if (!ctx.rng().bernoulli(ctx.scratch().probability[target])) return;

    const Label source = labels_[v];
    const auto d = static_cast<std::int64_t>(graph_.degree(v));
    ctx.aggregate(loads_, source, -d);
    ctx.aggregate(loads_, target, d);
    ctx.aggregate(counts_, source, std::int64_t{-1});
    ctx.aggregate(counts_, target, std::int64_t{1});
    ctx.aggregate(migrations_, 0, std::int64_t{1});
    ctx.aggregate(locality_, 0, static_cast<double>(gain_[v]) / static_cast<double>(d));
    ctx.aggregate(state_hash_, 0, state_key(v, target) - state_key(v, source));
    labels_[v] = target;
    announce(ctx, v, target);
  }

  bool evaluate_iteration(bsp::MasterContext& master) {
    const auto loads = master.aggregated(loads_);
    const auto counts = master.aggregated(counts_);
    double locality = master.aggregated(locality_)[0];
    if (recompute_locality(iteration_)) {
      const double full = master.aggregated(locality_full_)[0];
      const double drift = std::abs(locality - full) / std::max(1.0, std::abs(full));
      report_.max_score_drift = std::max(report_.max_score_drift, drift);
      const double value[] = {full};
      master.assign(locality_, std::span<const double>(value));
      locality = full;
    }

    double penalty = 0.0;
    std::int64_t max_load = 0;
    std::int64_t total_load = 0;
    for (std::size_t l = 0; l < config_.k; ++l) {
      if (capacity_ > 0.0) penalty += static_cast<double>(counts[l]) * static_cast<double>(loads[l]) / capacity_;
      max_load = std::max(max_load, loads[l]);
      total_load += loads[l];
    }

    IterationStats stats;
    stats.iteration = iteration_;
    stats.score = locality - penalty;
    const auto local = master.aggregated(local_weight_)[0];
    stats.phi = total_load > 0 ? static_cast<double>(local) / static_cast<double>(total_load) : 1.0;
    stats.rho = total_load > 0 ? static_cast<double>(max_load) * static_cast<double>(config_.k) /
                                     static_cast<double>(total_load)
                               : 1.0;
    stats.migrations = pending_migrations_;
    stats.candidates = static_cast<std::uint64_t>(master.aggregated(candidates_)[0]);
    if (iteration_ > 0) {
      // ComputeScores and ComputeMigrations of the previous iteration.
      const std::size_t n = superstep_seconds_.size();
      stats.seconds = superstep_seconds_[n - 3] + superstep_seconds_[n - 2];
    }
    const std::uint64_t hash = master.aggregated(state_hash_)[0];
    stats.repeats_earlier_state = iteration_ >= 2 && hash == recent_hashes_[0];
    recent_hashes_[0] = recent_hashes_[1];
    recent_hashes_[1] = hash;
    report_.series.push_back(stats);
    ++iteration_;

    if (tracker_.update(stats.score, stats.repeats_earlier_state)) {
      report_.halt = HaltReason::converged;
      return false;
    }
    if (iteration_ >= config_.max_iterations) {
      report_.halt = HaltReason::cap;
      return false;
    }
    return true;
  }

  const Graph& graph_;
  SpinnerConfig config_;
  InitPlan plan_;
  const RunOptions& options_;
  double capacity_;

  // Per-vertex state; each entry is written only by the owning worker.
  std::vector<Label> labels_;
  std::vector<Label> target_;
  std::vector<std::int64_t> gain_;
  // Last known label of each neighbor, aligned with the graph's adjacency.
  std::vector<Label> cache_;

  bsp::AggregatorHandle<std::int64_t> loads_, counts_, candidate_load_, migrations_, candidates_, local_weight_,
      relabeled_;
  bsp::AggregatorHandle<double> locality_, locality_full_;
  bsp::AggregatorHandle<std::uint64_t> state_hash_;

  // Master state, modified only at barriers.
  HaltingTracker tracker_;
  std::size_t iteration_ = 0;
  std::uint64_t pending_migrations_ = 0;
  // Labeling hashes of the two previous iterations, oldest first.
  std::uint64_t recent_hashes_[2] = {0, 0};
  std::vector<double> superstep_seconds_;
  RunReport report_;
};

RunReport run(const Graph& graph, const SpinnerConfig& config, InitPlan plan, const RunOptions& options) {
  config.validate();
  std::vector<std::string> warnings;
  if (config.k > graph.num_vertices()) {
    warnings.push_back("k = " + std::to_string(config.k) + " exceeds the number of vertices (" +
                       std::to_string(graph.num_vertices()) + ")");
  }
  const auto start = std::chrono::steady_clock::now();
  SpinnerProgram program(graph, config, std::move(plan), options);
  bsp::EngineOptions engine_options;
  engine_options.workers = config.workers;
  engine_options.seed = config.seed;
  engine_options.max_supersteps = 2 * config.max_iterations + 2;
  bsp::Engine<SpinnerProgram> engine(graph.num_vertices(), engine_options);
  const auto stats = engine.run(program);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunReport report = program.finish(stats, seconds);
  report.warnings = std::move(warnings);
  return report;
}

}  // namespace

RunReport partition(const Graph& graph, const SpinnerConfig& config, const RunOptions& options) {
  InitPlan plan;
  plan.mode = RunMode::scratch;
  return run(graph, config, std::move(plan), options);
}

RunReport adapt(const Graph& graph, const PartitionMap& previous, std::span<const VertexId> new_vertices,
                const SpinnerConfig& config, const RunOptions& options) {
  config.validate();
  const std::unordered_set<VertexId> fresh(new_vertices.begin(), new_vertices.end());
  InitPlan plan;
  plan.mode = RunMode::adapt;
  plan.previous_k = config.k;
  plan.labels.assign(graph.num_vertices(), kNoLabel);

  std::vector<std::int64_t> loads(config.k, 0);
  std::vector<VertexIndex> pending;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    const VertexId id = graph.id(v);
    if (fresh.contains(id)) {
      pending.push_back(v);
      continue;
    }
    auto label = previous.find(id);
    if (!label) throw InputError("vertex " + std::to_string(id) + " has no previous assignment");
    if (*label >= config.k) {
      throw InputError("vertex " + std::to_string(id) + " has label " + std::to_string(*label) +
                       " but k = " + std::to_string(config.k));
    }
    plan.labels[v] = *label;
    loads[*label] += static_cast<std::int64_t>(graph.degree(v));
  }
  for (VertexIndex v : pending) {
    const auto lightest = static_cast<Label>(std::min_element(loads.begin(), loads.end()) - loads.begin());
    plan.labels[v] = lightest;
    loads[lightest] += static_cast<std::int64_t>(graph.degree(v));
  }
  plan.placed = pending.size();
  return run(graph, config, std::move(plan), options);
}

RunReport elastic(const Graph& graph, const PartitionMap& previous, std::size_t previous_k,
                  const SpinnerConfig& config, const RunOptions& options) {
  config.validate();
  if (previous_k == 0) throw ConfigError("previous k must be at least 1");
  InitPlan plan;
  plan.mode = RunMode::elastic;
  plan.previous_k = previous_k;
  plan.labels.resize(graph.num_vertices());
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    auto label = previous.find(graph.id(v));
    if (!label) throw InputError("vertex " + std::to_string(graph.id(v)) + " has no previous assignment");
    if (*label >= previous_k) {
      throw InputError("vertex " + std::to_string(graph.id(v)) + " has label " + std::to_string(*label) +
                       " but previous k = " + std::to_string(previous_k));
    }
    plan.labels[v] = *label;
  }
  return run(graph, config, std::move(plan), options);
}

// ---------------------------------------------------------------------------
// Graph conversion as two supersteps.

namespace {

struct ConversionScratch {};

class ConversionProgram {
 public:
  using Message = std::uint8_t;
  using WorkerScratch = ConversionScratch;
  using Context = bsp::WorkerContext<ConversionProgram>;

  ConversionProgram(const std::vector<std::uint64_t>& offsets, const std::vector<VertexIndex>& targets)
      : offsets_(offsets), targets_(targets), rows_(offsets.size() - 1) {}

  void register_aggregators(bsp::AggregatorRegistry&) {}
  void begin_superstep(Context&) {}

  void compute(Context& ctx, VertexIndex v) {
    if (ctx.superstep() == 0) {
      // NeighborPropagation: tell each out-neighbor about the edge.
      for (auto i = offsets_[v]; i < offsets_[v + 1]; ++i) ctx.send(v, targets_[i], 0);
      return;
    }
    // NeighborDiscovery: an announcement from u upgrades an existing v->u
    // edge to weight 2, or creates u with weight 1.
    auto& row = rows_[v];
    for (auto i = offsets_[v]; i < offsets_[v + 1]; ++i) row.emplace_back(targets_[i], kOutgoing);
    std::sort(row.begin(), row.end());
    const std::size_t own = row.size();
    for (const auto& message : ctx.inbox(v)) {
      auto it = std::lower_bound(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(own),
                                 std::pair<VertexIndex, std::uint8_t>{message.source, 0});
      if (it != row.begin() + static_cast<std::ptrdiff_t>(own) && it->first == message.source) {
        it->second |= kIncoming;
      } else {
        row.emplace_back(message.source, kIncoming);
      }
    }
  }

  bool master(bsp::MasterContext& master) { return master.superstep() < 1; }

  const std::vector<std::vector<std::pair<VertexIndex, std::uint8_t>>>& rows() const { return rows_; }

 private:
  const std::vector<std::uint64_t>& offsets_;
  const std::vector<VertexIndex>& targets_;
  std::vector<std::vector<std::pair<VertexIndex, std::uint8_t>>> rows_;
};

}  // namespace

Graph convert_on_engine(const DirectedEdgeList& list, std::size_t workers) {
  std::vector<VertexId> ids;
  ids.reserve(2 * list.edges.size() + list.isolated_vertices.size());
  for (const auto& e : list.edges) {
    ids.push_back(e.source);
    ids.push_back(e.target);
  }
  ids.insert(ids.end(), list.isolated_vertices.begin(), list.isolated_vertices.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index = [&](VertexId id) {
    return static_cast<VertexIndex>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  // Out-adjacency of the directed graph.
  std::vector<std::uint64_t> offsets(ids.size() + 1, 0);
  for (const auto& e : list.edges) {
    if (e.source != e.target) ++offsets[index(e.source) + 1];
  }
  for (std::size_t v = 0; v < ids.size(); ++v) offsets[v + 1] += offsets[v];
  std::vector<VertexIndex> targets(offsets.back());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : list.edges) {
    if (e.source != e.target) targets[cursor[index(e.source)]++] = index(e.target);
  }

  ConversionProgram program(offsets, targets);
  bsp::EngineOptions options;
  options.workers = workers;
  bsp::Engine<ConversionProgram> engine(ids.size(), options);
  engine.run(program);

  const auto& rows = program.rows();
  return Graph::build(std::move(ids), [&](auto&& sink) {
    for (VertexIndex v = 0; v < rows.size(); ++v) {
      for (auto [u, bits] : rows[v]) sink(v, u, bits);
    }
  });
}

}  // namespace spinner
