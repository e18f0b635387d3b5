#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "spinner/types.hpp"

namespace spinner {

struct DirectedEdge {
  VertexId source = 0;
  VertexId target = 0;

  auto operator<=>(const DirectedEdge&) const = default;
};

/// A directed edge set with self-loops removed and duplicates collapsed.
/// Vertex ids are arbitrary unsigned integers. Vertices that have no edges
/// only exist in the graph if listed in `isolated_vertices`.
struct DirectedEdgeList {
  std::vector<DirectedEdge> edges;
  std::vector<VertexId> isolated_vertices;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;

  /// Normalizes raw input: drops self-loops and deduplicates, recording both
  /// counts. With `undirected`, every pair is inserted in both directions.
  static DirectedEdgeList from_raw(std::vector<DirectedEdge> raw, bool undirected = false);
};

/// Edge additions (and optional removals) applied on top of an existing graph.
struct GraphDelta {
  std::vector<DirectedEdge> added;
  std::vector<DirectedEdge> removed;

  bool empty() const { return added.empty() && removed.empty(); }
};

/// Bits describing which directed edges back an undirected adjacency entry
/// (v, u): kOutgoing for v->u, kIncoming for u->v.
enum Direction : std::uint8_t {
  kOutgoing = 1,
  kIncoming = 2,
};

/// Immutable weighted undirected graph in CSR form.
///
/// The weight of {u, v} is the number of directed edges between u and v in
/// the source graph, so it is 1 when exactly one direction exists and 2 when
/// both do. Rows are sorted by neighbor index and symmetric.
class Graph {
 public:
  Graph() = default;

  std::size_t num_vertices() const { return ids_.size(); }
  /// Number of adjacency entries, i.e. twice the number of undirected edges.
  std::size_t num_entries() const { return neighbors_.size(); }
  /// Number of undirected edges (unordered adjacent pairs).
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const VertexIndex> neighbors(VertexIndex v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::span<const EdgeWeight> weights(VertexIndex v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }
  std::span<const std::uint8_t> directions(VertexIndex v) const {
    return {directions_.data() + offsets_[v], directions_.data() + offsets_[v + 1]};
  }
  std::uint64_t entry_offset(VertexIndex v) const { return offsets_[v]; }

  /// Sum of incident edge weights.
  std::uint64_t degree(VertexIndex v) const { return degrees_[v]; }
  std::span<const std::uint64_t> degrees() const { return degrees_; }

  /// Sum of weights over undirected edges; equals the directed edge count for
  /// directed inputs.
  std::uint64_t total_weight() const { return total_weight_; }
  /// Sum of all degrees, 2 * total_weight().
  std::uint64_t total_degree() const { return 2 * total_weight_; }

  VertexId id(VertexIndex v) const { return ids_[v]; }
  std::span<const VertexId> ids() const { return ids_; }
  std::optional<VertexIndex> index_of(VertexId id) const;

  /// Weight of {u, v}, or 0 if not adjacent.
  EdgeWeight weight_between(VertexIndex u, VertexIndex v) const;

  /// All (source id, target id, direction bits) entries sorted by ids; two
  /// graphs with equal canonical forms are the same graph up to index order.
  std::vector<std::tuple<VertexId, VertexId, std::uint8_t>> canonical_entries() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.canonical_entries() == b.canonical_entries();
  }

  /// Builds a graph from row entries. `emit` is called twice (counting pass
  /// and fill pass) with a sink `(VertexIndex row, VertexIndex column,
  /// std::uint8_t bits)`. Entries with equal (row, column) are merged by OR-ing
  /// the direction bits; the caller must emit both mirrored halves.
  template <typename Emit>
  static Graph build(std::vector<VertexId> ids, Emit&& emit);

 private:
  static Graph assemble(std::vector<VertexId> ids, std::vector<std::uint64_t> offsets,
                        std::vector<std::uint64_t> packed);

  std::vector<VertexId> ids_;
  // Present when ids_ is not ascending: (id, index) sorted by id.
  std::vector<std::pair<VertexId, VertexIndex>> id_lookup_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexIndex> neighbors_;
  std::vector<EdgeWeight> weights_;
  std::vector<std::uint8_t> directions_;
  std::vector<std::uint64_t> degrees_;
  std::uint64_t total_weight_ = 0;
};

/// Converts a directed edge list into the weighted undirected graph. Dense
/// indices follow ascending vertex id.
Graph to_undirected(const DirectedEdgeList& edges);

struct DeltaResult {
  Graph graph;
  /// Indices (in `graph`) of vertices whose adjacency changed.
  std::vector<VertexIndex> changed;
  /// Ids that did not exist in the base graph, in index order.
  std::vector<VertexId> new_vertices;
};

/// Applies a delta. Existing vertices keep their indices and new vertices are
/// appended. An added reverse edge upgrades a weight-1 edge to weight 2;
/// removing one direction of a weight-2 edge downgrades it.
DeltaResult apply_delta(const Graph& graph, const GraphDelta& delta);

// ---------------------------------------------------------------------------

template <typename Emit>
Graph Graph::build(std::vector<VertexId> ids, Emit&& emit) {
  const std::size_t n = ids.size();
  std::vector<std::uint64_t> offsets(n + 1, 0);
  emit([&](VertexIndex row, VertexIndex, std::uint8_t) { ++offsets[row + 1]; });
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];

  std::vector<std::uint64_t> packed(offsets[n]);
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  emit([&](VertexIndex row, VertexIndex column, std::uint8_t bits) {
    packed[cursor[row]++] = (static_cast<std::uint64_t>(column) << 8) | bits;
  });
  return assemble(std::move(ids), std::move(offsets), std::move(packed));
}

}  // namespace spinner
