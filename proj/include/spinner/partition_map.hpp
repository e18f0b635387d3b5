#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinner/graph.hpp"
#include "spinner/types.hpp"

namespace spinner {

/// Assignment of original vertex ids to labels, kept sorted by id.
class PartitionMap {
 public:
  struct Entry {
    VertexId id = 0;
    Label label = 0;

    auto operator<=>(const Entry&) const = default;
  };

  PartitionMap() = default;
  /// Throws InputError on duplicate ids.
  explicit PartitionMap(std::vector<Entry> entries);

  static PartitionMap from_labels(const Graph& graph, std::span<const Label> labels);

  std::optional<Label> find(VertexId id) const;
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// One past the largest label, 0 when empty.
  std::size_t label_bound() const;

  bool operator==(const PartitionMap&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// "id<TAB>label" lines in ascending id order.
std::string format_partition_map(const PartitionMap& map);
PartitionMap parse_partition_map(std::string_view text, std::string_view source);

PartitionMap read_partition_map(const std::filesystem::path& path);
void write_partition_map(const std::filesystem::path& path, const PartitionMap& map);

}  // namespace spinner
