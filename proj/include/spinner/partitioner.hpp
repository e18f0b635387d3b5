#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spinner/graph.hpp"
#include "spinner/partition_map.hpp"
#include "spinner/rng.hpp"
#include "spinner/scoring.hpp"
#include "spinner/types.hpp"

namespace spinner {

struct SpinnerConfig {
  /// Number of partitions.
  std::size_t k = 2;
  /// Capacity slack: each partition may hold up to c * |E| / k edge weight.
  double c = 1.05;
  /// Relative score improvement at or below which an iteration counts as idle.
  double epsilon = 0.001;
  /// Consecutive idle iterations before halting.
  std::size_t window = 5;
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Every this many iterations the incrementally maintained global score is
  /// replaced by a full recomputation. 0 disables.
  std::size_t score_resync_interval = 32;

  /// Throws ConfigError.
  void validate() const;
};

enum class HaltReason { converged, cap };

/// Steady-state detector over the sequence of global scores. An iteration is
/// idle when its improvement is at most epsilon * |previous score|; the run
/// halts after `window` consecutive idle iterations. An iteration that
/// returns to the labeling of two iterations earlier is idle as well, since a
/// run caught in such a swap cycle makes no progress even though its score
/// alternates.
class HaltingTracker {
 public:
  HaltingTracker(double epsilon, std::size_t window) : epsilon_(epsilon), window_(window) {}

  /// Records the next score. Returns true when the halting condition holds.
  bool update(double score, bool repeats_earlier_state = false);
  std::size_t idle_streak() const { return idle_; }

 private:
  double epsilon_;
  std::size_t window_;
  bool has_previous_ = false;
  double previous_ = 0.0;
  std::size_t idle_ = 0;
};

enum class RunMode { scratch, adapt, elastic };

std::string to_string(HaltReason reason);
std::string to_string(RunMode mode);

/// State at the start of an iteration, i.e. after the previous round of
/// migrations. Iteration 0 is the initial labeling.
struct IterationStats {
  std::size_t iteration = 0;
  double phi = 0.0;
  double rho = 0.0;
  double score = 0.0;
  /// Vertices that changed label in the round leading to this state.
  std::uint64_t migrations = 0;
  /// Vertices flagged as candidates while evaluating this state.
  std::uint64_t candidates = 0;
  /// The labeling equals the one two iterations earlier.
  bool repeats_earlier_state = false;
  /// Wall time of the ComputeScores and ComputeMigrations supersteps that
  /// produced this state (0 for iteration 0).
  double seconds = 0.0;
};

struct RunReport {
  SpinnerConfig config;
  RunMode mode = RunMode::scratch;
  HaltReason halt = HaltReason::converged;
  /// Number of evaluated iterations; equals series.size().
  std::size_t iterations = 0;
  std::vector<IterationStats> series;
  /// Final label per vertex index.
  std::vector<Label> labels;
  /// Final loads b(l).
  std::vector<std::int64_t> loads;

  /// Partition count before the run (differs from config.k for elastic runs).
  std::size_t previous_k = 0;
  /// Vertices whose label changed during initialization relative to the
  /// previous assignment (elastic relabeling, adapt placement of new vertices).
  std::uint64_t initial_relabeled = 0;

  /// Wall time of the first ComputeScores + ComputeMigrations pair.
  double first_iteration_seconds = 0.0;
  double total_seconds = 0.0;
  std::size_t supersteps = 0;
  /// Largest relative gap seen between the incremental and recomputed score.
  double max_score_drift = 0.0;
  std::vector<std::string> warnings;

  const IterationStats& final_stats() const { return series.back(); }
};

enum class Phase { initialization, compute_scores, compute_migrations };

/// Barrier snapshot passed to RunOptions::on_barrier.
struct BarrierView {
  std::size_t superstep = 0;
  Phase phase = Phase::initialization;
  std::span<const Label> labels;
  std::span<const std::int64_t> loads;
  std::span<const std::int64_t> vertex_counts;
};

/// Inputs and outcome of one label evaluation, passed to
/// RunOptions::on_score. `rng_before` is the worker RNG state before the call,
/// so an independent evaluator can reproduce tie-breaking.
struct ScoreTrace {
  VertexIndex vertex = 0;
  Label current = kNoLabel;
  std::span<const Label> neighbor_labels;
  std::span<const EdgeWeight> weights;
  std::span<const std::int64_t> loads;
  double capacity = 0.0;
  const Rng* rng_before = nullptr;
  ScoreDecision decision;
  std::span<const double> scores;
};

struct RunOptions {
  /// Called at every barrier. Runs on the control thread.
  std::function<void(const BarrierView&)> on_barrier;
  /// Called for every label evaluation, from worker threads. Intended for
  /// single-worker test runs.
  std::function<void(const ScoreTrace&)> on_score;
  /// Recompute the global score every iteration and track drift.
  bool verify_score = false;
};

/// Labels every vertex uniformly at random and iterates to a steady state.
RunReport partition(const Graph& graph, const SpinnerConfig& config, const RunOptions& options = {});

/// Restarts from a previous assignment after graph changes. Vertices listed in
/// `new_vertices` are placed on the least-loaded partition (ties to the lowest
/// label, sequentially in index order); all other vertices must appear in
/// `previous`. Every vertex takes part in the restarted iterations.
RunReport adapt(const Graph& graph, const PartitionMap& previous, std::span<const VertexId> new_vertices,
                const SpinnerConfig& config, const RunOptions& options = {});

/// Changes the number of partitions from `previous_k` to `config.k`. When
/// growing by n, each vertex moves with probability n / (k + n) to a uniformly
/// chosen new label; when shrinking, vertices on removed labels move to a
/// uniformly chosen surviving label. Iterations then restart.
RunReport elastic(const Graph& graph, const PartitionMap& previous, std::size_t previous_k,
                  const SpinnerConfig& config, const RunOptions& options = {});

/// Sum over vertices of their current label score, computed from scratch.
/// Zero-degree vertices contribute only their penalty term.
double global_score(const Graph& graph, std::span<const Label> labels, std::size_t k, double c);

/// Loads b(l) = sum of degrees of vertices labeled l.
std::vector<std::int64_t> compute_loads(const Graph& graph, std::span<const Label> labels, std::size_t k);

/// Converts a directed edge list on the engine itself: one superstep in which
/// every vertex announces itself to its out-neighbors, and one in which each
/// vertex merges the announcements into weighted undirected edges.
Graph convert_on_engine(const DirectedEdgeList& edges, std::size_t workers = 1);

}  // namespace spinner
