#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spinner {

/// One point of the overflow-probability check.
struct TailBoundPoint {
  double epsilon = 0.0;
  /// Trials in which the migrated load exceeded (1 + epsilon) * r.
  std::uint64_t overflows = 0;
  double empirical = 0.0;
  /// exp(-2 |M| (epsilon r / (max_deg - min_deg))^2). When all degrees are
  /// equal the expression is undefined and the exact tail is used instead.
  double stated_bound = 1.0;
  /// Hoeffding's inequality for a sum of independent variables in [0, d_i]:
  /// exp(-2 (epsilon r)^2 / sum d_i^2).
  double hoeffding_bound = 1.0;
  /// Exact binomial tail, available when all degrees are equal.
  std::optional<double> exact;
  /// Three binomial standard errors of a frequency equal to each bound.
  double tolerance = 0.0;
  double hoeffding_tolerance = 0.0;

  bool stated_holds() const { return empirical <= stated_bound + tolerance; }
  bool hoeffding_holds() const { return empirical <= hoeffding_bound + hoeffding_tolerance; }
};

struct TailBoundReport {
  std::size_t candidates = 0;
  double remaining_capacity = 0.0;
  double candidate_load = 0.0;
  /// Migration probability min(1, r / m).
  double probability = 0.0;
  std::uint64_t min_degree = 0;
  std::uint64_t max_degree = 0;
  std::uint64_t trials = 0;
  std::vector<TailBoundPoint> points;
};

inline const std::vector<double> kDefaultEpsilonGrid = {0.1, 0.2, 0.3, 0.4, 0.5};

/// Simulates one migration round towards a single partition: each candidate
/// with degree d_i moves independently with probability min(1, r / m), and the
/// moved load is compared with r. Deterministic for a given seed.
TailBoundReport verify_tail_bound(std::span<const std::uint64_t> degrees, double remaining_capacity,
                                  std::uint64_t trials, std::uint64_t seed,
                                  std::span<const double> epsilons = kDefaultEpsilonGrid);

/// The stated bound for |M| candidates with degrees in [min_degree, max_degree].
double stated_tail_bound(std::size_t candidates, double epsilon, double remaining_capacity,
                         std::uint64_t min_degree, std::uint64_t max_degree);

/// P[Binomial(n, p) > x], computed exactly in log space.
double binomial_upper_tail(std::uint64_t n, double p, double x);

}  // namespace spinner
