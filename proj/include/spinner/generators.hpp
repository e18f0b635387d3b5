#pragma once

#include <cstddef>
#include <cstdint>

#include "spinner/graph.hpp"

namespace spinner {

struct WattsStrogatzSpec {
  std::size_t n = 0;
  /// Out-edges per vertex; must be even.
  std::size_t d = 40;
  /// Probability that an edge is rewired.
  double beta = 0.3;
  std::uint64_t seed = 0;
};

/// Directed small-world graph on ids 0..n-1. Vertex i first links to
/// i +- 1, ..., i +- d/2 (mod n); then every edge independently, with
/// probability beta, gets a new target drawn uniformly among vertices that are
/// neither i nor already targets of i, if any such vertex exists. Every
/// vertex keeps out-degree d.
/// Throws ConfigError unless d is even, n > d and beta is in [0, 1].
DirectedEdgeList watts_strogatz(const WattsStrogatzSpec& spec);

/// round(fraction * total_weight) new directed edges between vertices that are
/// not yet adjacent, endpoints drawn proportionally to their degree
/// (uniformly when the graph has no edges). No self-loops, no repeated pairs.
/// Throws ConfigError when fraction is negative or the graph cannot hold that
/// many new edges.
GraphDelta delta_stream(const Graph& graph, double fraction, std::uint64_t seed);

}  // namespace spinner
