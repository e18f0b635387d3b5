#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spinner/rng.hpp"
#include "spinner/types.hpp"

namespace spinner {

/// Scores closer than this are treated as equal when selecting the best label.
inline constexpr double kScoreTieTolerance = 1e-12;

/// Per-partition capacity: c * (sum of degrees) / k.
double partition_capacity(double c, std::uint64_t total_degree, std::size_t k);

/// Probability that a candidate for a partition migrates: 0 when the
/// partition is at or over capacity (remaining <= 0), 1 when nobody wants it,
/// otherwise min(1, remaining / candidate_load).
double migration_probability(double remaining, std::int64_t candidate_load);

struct ScoreDecision {
  Label best = kNoLabel;
  /// best != current; implies a strictly higher score than the current label.
  bool candidate = false;
  double best_score = 0.0;
  double current_score = 0.0;
};

/// Evaluates the balance-penalized label score of one vertex against every
/// label in [0, k):
///
///   score(l) = (weight of neighbors labeled l) / deg(v) - load(l) / capacity
///
/// The best label is the maximum; among tied maxima the current label wins,
/// otherwise one tied label is drawn uniformly (one `uniform_index(ties)` call,
/// picking the j-th tied label in ascending order). No RNG draw happens when
/// the maximum is unique or the current label is tied.
///
/// Holds reusable per-worker buffers; not thread-safe.
class LabelScorer {
 public:
  explicit LabelScorer(std::size_t k = 0) { resize(k); }

  void resize(std::size_t k);
  std::size_t k() const { return scores_.size(); }

  /// `neighbor_labels` entries equal to kNoLabel contribute to the degree but
  /// to no label. A vertex with zero degree is never a candidate.
  ScoreDecision evaluate(std::span<const Label> neighbor_labels, std::span<const EdgeWeight> weights,
                         Label current, std::span<const std::int64_t> loads, double capacity, Rng& rng);

  /// Scores of the last evaluation (empty for zero-degree vertices).
  std::span<const double> scores() const { return {scores_.data(), last_evaluated_ ? scores_.size() : 0}; }
  /// Weight of neighbors carrying `label` in the last evaluation.
  std::uint64_t neighbor_weight(Label label) const { return label_weight_[label]; }
  std::uint64_t last_degree() const { return last_degree_; }

 private:
  std::vector<double> scores_;
  std::vector<std::uint64_t> label_weight_;
  std::vector<Label> touched_;
  std::uint64_t last_degree_ = 0;
  bool last_evaluated_ = false;
};

/// Worker-local view of partition loads during a superstep: the loads merged
/// at the last barrier plus this worker's own tentative changes. Changes are
/// visible to later vertices on the same worker only.
class WorkerLoadView {
 public:
  void reset(std::span<const std::int64_t> barrier_loads) { view_.assign(barrier_loads.begin(), barrier_loads.end()); }
  void update(Label label, std::int64_t delta) { view_[label] += delta; }
  std::span<const std::int64_t> loads() const { return view_; }

 private:
  std::vector<std::int64_t> view_;
};

}  // namespace spinner
