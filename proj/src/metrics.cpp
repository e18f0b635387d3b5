#include "spinner/metrics.hpp"

#include <algorithm>

namespace spinner {

QualityReport quality(const Graph& graph, std::span<const Label> labels, std::size_t k) {
  if (labels.size() != graph.num_vertices()) throw InputError("assignment does not cover the graph");
  QualityReport report;
  std::vector<std::uint64_t> loads(k, 0);
  std::uint64_t local_entries = 0;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    const Label own = labels[v];
    if (own >= k) throw InputError("label " + std::to_string(own) + " out of range for k = " + std::to_string(k));
    loads[own] += graph.degree(v);
    auto row = graph.neighbors(v);
    auto w = graph.weights(v);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (labels[row[i]] == own) local_entries += w[i];
    }
  }
  // Each local edge was seen from both endpoints.
  report.local_edges = local_entries / 2;
  report.total_edges = graph.total_weight();
  if (report.total_edges > 0) {
    report.phi = static_cast<double>(report.local_edges) / static_cast<double>(report.total_edges);
  }
  report.directed_phi = report.phi;
  report.max_load = k > 0 ? *std::max_element(loads.begin(), loads.end()) : 0;
  const std::uint64_t total_load = graph.total_degree();
  if (total_load > 0) {
    report.rho = static_cast<double>(report.max_load) * static_cast<double>(k) / static_cast<double>(total_load);
  }
  return report;
}

double partitioning_difference(const PartitionMap& a, const PartitionMap& b) {
  auto x = a.entries();
  auto y = b.entries();
  std::size_t i = 0, j = 0, common = 0, differ = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].id < y[j].id) {
      ++i;
    } else if (y[j].id < x[i].id) {
      ++j;
    } else {
      ++common;
      if (x[i].label != y[j].label) ++differ;
      ++i;
      ++j;
    }
  }
  return common == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(common);
}

double partitioning_difference(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw InputError("assignments differ in size");
  if (a.empty()) return 0.0;
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i];
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<Label> hash_baseline(const Graph& graph, std::size_t k, HashKind kind) {
  if (k == 0) throw ConfigError("k must be at least 1");
  std::vector<Label> labels(graph.num_vertices());
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    const std::uint64_t h = kind == HashKind::mix ? mix64(graph.id(v)) : graph.id(v);
    labels[v] = static_cast<Label>(h % k);
  }
  return labels;
}

CutMessages cut_message_count(const Graph& graph, std::span<const Label> labels) {
  CutMessages out;
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) {
    auto row = graph.neighbors(v);
    auto w = graph.weights(v);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const VertexIndex u = row[i];
      if (u < v) continue;
      const Label a = labels[v], b = labels[u];
      if (a == b) continue;
      out.total += w[i];
      out.by_pair[{std::min(a, b), std::max(a, b)}] += w[i];
    }
  }
  return out;
}

}  // namespace spinner
