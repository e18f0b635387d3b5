#include "spinner/generators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "spinner/rng.hpp"

namespace spinner {

DirectedEdgeList watts_strogatz(const WattsStrogatzSpec& spec) {
  if (spec.d % 2 != 0) throw ConfigError("d must be even");
  if (spec.n <= spec.d) throw ConfigError("n must exceed d");
  if (!(spec.beta >= 0.0 && spec.beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");

  const std::size_t n = spec.n;
  const std::size_t half = spec.d / 2;
  Rng rng(spec.seed);
  DirectedEdgeList out;
  out.edges.reserve(n * spec.d);
  std::vector<VertexId> targets(spec.d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j <= half; ++j) {
      targets[2 * (j - 1)] = (i + j) % n;
      targets[2 * (j - 1) + 1] = (i + n - j) % n;
    }
    // With n = d + 1 every other vertex is already a target.
    const bool can_rewire = n - 1 > spec.d;
    for (auto& t : targets) {
      if (!rng.bernoulli(spec.beta) || !can_rewire) continue;
      VertexId pick;
      do {
        pick = rng.uniform_index(n);
      } while (pick == i || std::find(targets.begin(), targets.end(), pick) != targets.end());
      t = pick;
    }
    for (VertexId t : targets) out.edges.push_back({i, t});
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

GraphDelta delta_stream(const Graph& graph, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0)) throw ConfigError("fraction must be non-negative");
  GraphDelta delta;
  const auto count = static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(graph.total_weight())));
  if (count == 0) return delta;

  const std::uint64_t n = graph.num_vertices();
  const std::uint64_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  if (n < 2 || graph.num_edges() + count > pairs) throw ConfigError("graph cannot hold that many new edges");

  // Cumulative degrees for proportional sampling.
  std::vector<std::uint64_t> cumulative(n);
  std::uint64_t running = 0;
  for (VertexIndex v = 0; v < n; ++v) {
    running += graph.degree(v);
    cumulative[v] = running;
  }
  Rng rng(seed);
  auto draw = [&]() -> VertexIndex {
    if (running == 0) return static_cast<VertexIndex>(rng.uniform_index(n));
    const std::uint64_t x = rng.uniform_index(running);
    return static_cast<VertexIndex>(std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
  };

  std::unordered_set<std::uint64_t> chosen;
  const std::uint64_t max_attempts = 1000 * count + 100000;
  for (std::uint64_t attempt = 0; delta.added.size() < count; ++attempt) {
    if (attempt == max_attempts) throw ConfigError("could not find enough non-adjacent vertex pairs");
    const VertexIndex u = draw();
    const VertexIndex v = draw();
    if (u == v || graph.weight_between(u, v) != 0) continue;
    const std::uint64_t key = (static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v);
    if (!chosen.insert(key).second) continue;
    delta.added.push_back({graph.id(u), graph.id(v)});
  }
  return delta;
}

}  // namespace spinner
