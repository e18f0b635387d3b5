#include "spinner/tail_bound.hpp"

#include <algorithm>
#include <cmath>

#include "spinner/rng.hpp"
#include "spinner/types.hpp"

namespace spinner {

namespace {

double three_sigma(double p, std::uint64_t trials) {
  p = std::clamp(p, 0.0, 1.0);
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace

double stated_tail_bound(std::size_t candidates, double epsilon, double remaining_capacity,
                         std::uint64_t min_degree, std::uint64_t max_degree) {
  if (max_degree == min_degree) return 1.0;
  const double phi = epsilon * remaining_capacity / static_cast<double>(max_degree - min_degree);
  return std::exp(-2.0 * static_cast<double>(candidates) * phi * phi);
}

double binomial_upper_tail(std::uint64_t n, double p, double x) {
  if (p <= 0.0) return x < 0.0 ? 1.0 : 0.0;
  if (p >= 1.0) return static_cast<double>(n) > x ? 1.0 : 0.0;
  const double first = std::floor(x) + 1.0;
  if (first > static_cast<double>(n)) return 0.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (auto j = static_cast<std::uint64_t>(std::max(0.0, first)); j <= n; ++j) {
    const double jj = static_cast<double>(j);
    const double term = lg_n - std::lgamma(jj + 1.0) - std::lgamma(static_cast<double>(n) - jj + 1.0) +
                        jj * log_p + (static_cast<double>(n) - jj) * log_q;
    sum += std::exp(term);
  }
  return std::min(1.0, sum);
}

TailBoundReport verify_tail_bound(std::span<const std::uint64_t> degrees, double remaining_capacity,
                                  std::uint64_t trials, std::uint64_t seed, std::span<const double> epsilons) {
  if (degrees.empty()) throw ConfigError("candidate degrees must not be empty");
  if (!(remaining_capacity > 0.0)) throw ConfigError("remaining capacity must be positive");
  if (trials == 0) throw ConfigError("trials must be positive");

  TailBoundReport report;
  report.candidates = degrees.size();
  report.remaining_capacity = remaining_capacity;
  report.trials = trials;
  auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
  report.min_degree = *lo;
  report.max_degree = *hi;
  double sum = 0.0, sum_squares = 0.0;
  for (auto d : degrees) {
    sum += static_cast<double>(d);
    sum_squares += static_cast<double>(d) * static_cast<double>(d);
  }
  report.candidate_load = sum;
  report.probability = std::min(1.0, remaining_capacity / sum);

  std::vector<double> moved(trials);
  Rng rng(seed);
  for (auto& load : moved) {
    double total = 0.0;
    for (auto d : degrees) {
      if (rng.bernoulli(report.probability)) total += static_cast<double>(d);
    }
    load = total;
  }

  for (double eps : epsilons) {
    TailBoundPoint point;
    point.epsilon = eps;
    const double threshold = (1.0 + eps) * remaining_capacity;
    point.overflows = static_cast<std::uint64_t>(
        std::count_if(moved.begin(), moved.end(), [&](double load) { return load > threshold; }));
    point.empirical = static_cast<double>(point.overflows) / static_cast<double>(trials);
    point.stated_bound =
        stated_tail_bound(degrees.size(), eps, remaining_capacity, report.min_degree, report.max_degree);
    const double gap = eps * remaining_capacity;
    point.hoeffding_bound = std::min(1.0, std::exp(-2.0 * gap * gap / sum_squares));
    if (report.min_degree == report.max_degree) {
      // Equal degrees: the moved load is d times a binomial count.
      point.exact = binomial_upper_tail(degrees.size(), report.probability,
                                        threshold / static_cast<double>(report.min_degree));
      point.stated_bound = *point.exact;
    }
    point.tolerance = three_sigma(point.stated_bound, trials);
    point.hoeffding_tolerance = three_sigma(point.hoeffding_bound, trials);
    report.points.push_back(point);
  }
  return report;
}

}  // namespace spinner
