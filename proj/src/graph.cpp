#include "spinner/graph.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace spinner {

namespace {

constexpr VertexIndex kUnassigned = std::numeric_limits<VertexIndex>::max();

EdgeWeight weight_of(std::uint8_t bits) {
  return static_cast<EdgeWeight>((bits & kOutgoing) + ((bits & kIncoming) >> 1));
}

void check_vertex_count(std::size_t n) {
  if (n >= kUnassigned) {
    throw InputError("graph has " + std::to_string(n) + " vertices; at most " +
                     std::to_string(kUnassigned - 1) + " are supported");
  }
}

// Maps arbitrary vertex ids to dense indices in ascending id order. Uses a
// direct table when ids are reasonably compact, sorting otherwise.
class IdIndex {
 public:
  explicit IdIndex(const DirectedEdgeList& list) {
    VertexId max_id = 0;
    for (const auto& e : list.edges) max_id = std::max({max_id, e.source, e.target});
    for (VertexId id : list.isolated_vertices) max_id = std::max(max_id, id);

    const std::uint64_t mentions = 2 * list.edges.size() + list.isolated_vertices.size();
    if (mentions == 0) return;
    if (max_id < 4 * mentions + 1024) {
      table_.assign(max_id + 1, kUnassigned);
      auto mark = [&](VertexId id) { table_[id] = 0; };
      for (const auto& e : list.edges) {
        mark(e.source);
        mark(e.target);
      }
      for (VertexId id : list.isolated_vertices) mark(id);
      for (VertexId id = 0; id <= max_id; ++id) {
        if (table_[id] != kUnassigned) {
          table_[id] = static_cast<VertexIndex>(ids_.size());
          ids_.push_back(id);
          check_vertex_count(ids_.size());
        }
      }
    } else {
      ids_.reserve(mentions);
      for (const auto& e : list.edges) {
        ids_.push_back(e.source);
        ids_.push_back(e.target);
      }
      ids_.insert(ids_.end(), list.isolated_vertices.begin(), list.isolated_vertices.end());
      std::sort(ids_.begin(), ids_.end());
      ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
      ids_.shrink_to_fit();
      check_vertex_count(ids_.size());
    }
  }

  VertexIndex operator()(VertexId id) const {
    if (!table_.empty()) return table_[id];
    return static_cast<VertexIndex>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
  }

  const std::vector<VertexId>& ids() const { return ids_; }

 private:
  std::vector<VertexIndex> table_;
  std::vector<VertexId> ids_;
};

std::uint64_t arc_key(VertexIndex s, VertexIndex t) {
  return (static_cast<std::uint64_t>(s) << 32) | t;
}

}  // namespace

DirectedEdgeList DirectedEdgeList::from_raw(std::vector<DirectedEdge> raw, bool undirected) {
  DirectedEdgeList list;
  const std::size_t lines = raw.size();
  if (undirected) {
    raw.reserve(2 * lines);
    for (std::size_t i = 0; i < lines; ++i) raw.push_back({raw[i].target, raw[i].source});
  }
  auto loops = std::remove_if(raw.begin(), raw.end(),
                              [](const DirectedEdge& e) { return e.source == e.target; });
  list.self_loops_dropped = static_cast<std::size_t>(raw.end() - loops);
  if (undirected) list.self_loops_dropped /= 2;
  raw.erase(loops, raw.end());

  std::sort(raw.begin(), raw.end());
  const std::size_t before = raw.size();
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  list.duplicates_dropped = before - raw.size();
  if (undirected) {
    // A line and its reverse both present count as one duplicate line.
    list.duplicates_dropped = lines - list.self_loops_dropped - raw.size() / 2;
  }
  list.edges = std::move(raw);
  return list;
}

Graph Graph::assemble(std::vector<VertexId> ids, std::vector<std::uint64_t> offsets,
                      std::vector<std::uint64_t> packed) {
  const std::size_t n = ids.size();
  Graph g;
  g.offsets_.assign(n + 1, 0);
  g.degrees_.assign(n, 0);

  // Sort each row, merge duplicates, compact in place.
  std::uint64_t write = 0;
  for (std::size_t v = 0; v < n; ++v) {
    auto first = packed.begin() + static_cast<std::ptrdiff_t>(offsets[v]);
    auto last = packed.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]);
    std::sort(first, last);
    std::uint64_t row_start = write;
    for (auto it = first; it != last; ++it) {
      if (write > row_start && (packed[write - 1] >> 8) == (*it >> 8)) {
        packed[write - 1] |= (*it & 0xff);
      } else {
        packed[write++] = *it;
      }
    }
    g.offsets_[v + 1] = write;
  }
  packed.resize(write);

  g.neighbors_.resize(write);
  g.weights_.resize(write);
  g.directions_.resize(write);
  std::uint64_t total_degree = 0;
  for (std::size_t v = 0; v < n; ++v) {
    std::uint64_t degree = 0;
    for (std::uint64_t i = g.offsets_[v]; i < g.offsets_[v + 1]; ++i) {
      const auto bits = static_cast<std::uint8_t>(packed[i] & 0xff);
      g.neighbors_[i] = static_cast<VertexIndex>(packed[i] >> 8);
      g.directions_[i] = bits;
      g.weights_[i] = weight_of(bits);
      degree += g.weights_[i];
    }
    g.degrees_[v] = degree;
    total_degree += degree;
  }
  g.total_weight_ = total_degree / 2;

  if (!std::is_sorted(ids.begin(), ids.end())) {
    g.id_lookup_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) g.id_lookup_.emplace_back(ids[v], static_cast<VertexIndex>(v));
    std::sort(g.id_lookup_.begin(), g.id_lookup_.end());
  }
  g.ids_ = std::move(ids);
  return g;
}

std::optional<VertexIndex> Graph::index_of(VertexId id) const {
  if (id_lookup_.empty()) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<VertexIndex>(it - ids_.begin());
  }
  auto it = std::lower_bound(id_lookup_.begin(), id_lookup_.end(), std::pair{id, VertexIndex{0}});
  if (it == id_lookup_.end() || it->first != id) return std::nullopt;
  return it->second;
}

EdgeWeight Graph::weight_between(VertexIndex u, VertexIndex v) const {
  auto row = neighbors(u);
  auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return 0;
  return weights_[offsets_[u] + static_cast<std::uint64_t>(it - row.begin())];
}

std::vector<std::tuple<VertexId, VertexId, std::uint8_t>> Graph::canonical_entries() const {
  std::vector<std::tuple<VertexId, VertexId, std::uint8_t>> out;
  out.reserve(num_entries() + num_vertices());
  for (VertexIndex v = 0; v < num_vertices(); ++v) {
    // Marker entry so that isolated vertices take part in the comparison.
    out.emplace_back(ids_[v], ids_[v], 0);
    auto row = neighbors(v);
    auto bits = directions(v);
    for (std::size_t i = 0; i < row.size(); ++i) out.emplace_back(ids_[v], ids_[row[i]], bits[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Graph to_undirected(const DirectedEdgeList& list) {
  const IdIndex lookup(list);
  return Graph::build(lookup.ids(), [&](auto&& sink) {
    for (const auto& e : list.edges) {
      if (e.source == e.target) continue;
      const VertexIndex s = lookup(e.source);
      const VertexIndex t = lookup(e.target);
      sink(s, t, kOutgoing);
      sink(t, s, kIncoming);
    }
  });
}

DeltaResult apply_delta(const Graph& graph, const GraphDelta& delta) {
  std::vector<VertexId> ids(graph.ids().begin(), graph.ids().end());
  const std::size_t old_n = ids.size();

  std::vector<VertexId> new_ids;
  std::unordered_map<VertexId, VertexIndex> fresh;
  auto resolve = [&](VertexId id) -> VertexIndex {
    if (auto idx = graph.index_of(id)) return *idx;
    auto [it, inserted] = fresh.try_emplace(id, static_cast<VertexIndex>(ids.size()));
    if (inserted) {
      ids.push_back(id);
      new_ids.push_back(id);
      check_vertex_count(ids.size());
    }
    return it->second;
  };

  std::vector<std::pair<VertexIndex, VertexIndex>> added;
  added.reserve(delta.added.size());
  for (const auto& e : delta.added) {
    if (e.source == e.target) continue;
    added.emplace_back(resolve(e.source), resolve(e.target));
  }
  std::unordered_set<std::uint64_t> removed;
  for (const auto& e : delta.removed) {
    auto s = graph.index_of(e.source);
    auto t = graph.index_of(e.target);
    if (s && t) removed.insert(arc_key(*s, *t));
  }

  Graph next = Graph::build(std::move(ids), [&](auto&& sink) {
    for (VertexIndex v = 0; v < old_n; ++v) {
      auto row = graph.neighbors(v);
      auto bits = graph.directions(v);
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::uint8_t b = bits[i];
        if (!removed.empty()) {
          if ((b & kOutgoing) && removed.contains(arc_key(v, row[i]))) b &= ~kOutgoing;
          if ((b & kIncoming) && removed.contains(arc_key(row[i], v))) b &= ~kIncoming;
        }
        if (b != 0) sink(v, row[i], b);
      }
    }
    for (auto [s, t] : added) {
      sink(s, t, kOutgoing);
      sink(t, s, kIncoming);
    }
  });

  DeltaResult result;
  std::vector<VertexIndex> touched;
  for (auto [s, t] : added) {
    touched.push_back(s);
    touched.push_back(t);
  }
  for (const auto& e : delta.removed) {
    if (auto s = graph.index_of(e.source)) touched.push_back(*s);
    if (auto t = graph.index_of(e.target)) touched.push_back(*t);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (VertexIndex v : touched) {
    if (v >= old_n) {
      result.changed.push_back(v);
      continue;
    }
    auto before_n = graph.neighbors(v);
    auto after_n = next.neighbors(v);
    auto before_b = graph.directions(v);
    auto after_b = next.directions(v);
    if (!std::equal(before_n.begin(), before_n.end(), after_n.begin(), after_n.end()) ||
        !std::equal(before_b.begin(), before_b.end(), after_b.begin(), after_b.end())) {
      result.changed.push_back(v);
    }
  }
  result.graph = std::move(next);
  result.new_vertices = std::move(new_ids);
  return result;
}

}  // namespace spinner
