#include "spinner/scoring.hpp"

#include <algorithm>
#include <limits>

namespace spinner {

double partition_capacity(double c, std::uint64_t total_degree, std::size_t k) {
  return c * static_cast<double>(total_degree) / static_cast<double>(k);
}

double migration_probability(double remaining, std::int64_t candidate_load) {
  if (remaining <= 0.0) return 0.0;
  if (candidate_load <= 0) return 1.0;
  return std::min(1.0, remaining / static_cast<double>(candidate_load));
}

void LabelScorer::resize(std::size_t k) {
  scores_.assign(k, 0.0);
  label_weight_.assign(k, 0);
  touched_.clear();
  last_evaluated_ = false;
}

ScoreDecision LabelScorer::evaluate(std::span<const Label> neighbor_labels,
                                    std::span<const EdgeWeight> weights, Label current,
                                    std::span<const std::int64_t> loads, double capacity, Rng& rng) {
  for (Label l : touched_) label_weight_[l] = 0;
  touched_.clear();

  std::uint64_t degree = 0;
  for (std::size_t i = 0; i < neighbor_labels.size(); ++i) {
    degree += weights[i];
    const Label l = neighbor_labels[i];
    if (l == kNoLabel) continue;
    if (label_weight_[l] == 0) touched_.push_back(l);
    label_weight_[l] += weights[i];
  }
  last_degree_ = degree;
  last_evaluated_ = degree != 0;
  if (degree == 0) return {current, false, 0.0, 0.0};

  const std::size_t k = scores_.size();
  const double inv_degree = 1.0 / static_cast<double>(degree);
  const double inv_capacity = capacity > 0.0 ? 1.0 / capacity : 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < k; ++l) {
    const double s = static_cast<double>(label_weight_[l]) * inv_degree -
                     static_cast<double>(loads[l]) * inv_capacity;
    scores_[l] = s;
    if (s > best) best = s;
  }

  const double floor = best - kScoreTieTolerance;
  ScoreDecision decision;
  decision.current_score = scores_[current];
  if (scores_[current] >= floor) {
    decision.best = current;
    decision.best_score = scores_[current];
    return decision;
  }

  std::size_t ties = 0;
  Label first = kNoLabel;
  for (std::size_t l = 0; l < k; ++l) {
    if (scores_[l] >= floor) {
      if (ties == 0) first = static_cast<Label>(l);
      ++ties;
    }
  }
  Label chosen = first;
  if (ties > 1) {
    std::uint64_t j = rng.uniform_index(ties);
    for (std::size_t l = 0; l < k; ++l) {
      if (scores_[l] >= floor && j-- == 0) {
        chosen = static_cast<Label>(l);
        break;
      }
    }
  }
  decision.best = chosen;
  decision.best_score = scores_[chosen];
  decision.candidate = true;
  return decision;
}

}  // namespace spinner
