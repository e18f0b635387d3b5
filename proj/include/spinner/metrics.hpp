#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "spinner/graph.hpp"
#include "spinner/partition_map.hpp"
#include "spinner/types.hpp"

namespace spinner {

struct QualityReport {
  /// Weighted fraction of local edges.
  double phi = 1.0;
  /// Most loaded partition over the ideal load; 1 when the graph has no edges.
  double rho = 1.0;
  /// Weight of edges whose endpoints share a label.
  std::uint64_t local_edges = 0;
  std::uint64_t total_edges = 0;
  /// Largest b(l).
  std::uint64_t max_load = 0;
  /// Directed-edge locality: fraction of directed edges of the input that are
  /// local. Equal to phi since every undirected weight counts directed edges.
  double directed_phi = 1.0;
};

QualityReport quality(const Graph& graph, std::span<const Label> labels, std::size_t k);

/// Fraction of vertices present in both maps whose labels differ. Vertices in
/// only one map are ignored. Returns 0 when there are no common vertices.
double partitioning_difference(const PartitionMap& a, const PartitionMap& b);

/// Same over label vectors of equal length.
double partitioning_difference(std::span<const Label> a, std::span<const Label> b);

enum class HashKind {
  mix,       ///< 64-bit finalizer of the id, then modulo k
  identity,  ///< id modulo k
};

/// Hash partitioning of original vertex ids: h(id) mod k.
std::vector<Label> hash_baseline(const Graph& graph, std::size_t k, HashKind kind = HashKind::mix);

struct CutMessages {
  /// Total weight of edges crossing partitions.
  std::uint64_t total = 0;
  /// Per unordered label pair (low, high).
  std::map<std::pair<Label, Label>, std::uint64_t> by_pair;
};

/// Messages exchanged per round of a vertex program that sends along every
/// directed edge: the weight of every cut edge.
CutMessages cut_message_count(const Graph& graph, std::span<const Label> labels);

}  // namespace spinner
