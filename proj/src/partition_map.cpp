#include "spinner/partition_map.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace spinner {

PartitionMap::PartitionMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                [](const Entry& a, const Entry& b) { return a.id == b.id; });
  if (dup != entries_.end()) {
    throw InputError("vertex " + std::to_string(dup->id) + " is assigned more than once");
  }
}

PartitionMap PartitionMap::from_labels(const Graph& graph, std::span<const Label> labels) {
  std::vector<Entry> entries(graph.num_vertices());
  for (VertexIndex v = 0; v < graph.num_vertices(); ++v) entries[v] = {graph.id(v), labels[v]};
  return PartitionMap(std::move(entries));
}

std::optional<Label> PartitionMap::find(VertexId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, VertexId key) { return e.id < key; });
  if (it == entries_.end() || it->id != id) return std::nullopt;
  return it->label;
}

std::size_t PartitionMap::label_bound() const {
  Label max = 0;
  for (const auto& e : entries_) max = std::max(max, e.label);
  return entries_.empty() ? 0 : static_cast<std::size_t>(max) + 1;
}

std::string format_partition_map(const PartitionMap& map) {
  std::string out;
  out.reserve(map.size() * 12);
  char tmp[40];
  for (const auto& e : map.entries()) {
    char* p = std::to_chars(tmp, tmp + 20, e.id).ptr;
    *p++ = '\t';
    p = std::to_chars(p, p + 12, e.label).ptr;
    *p++ = '\n';
    out.append(tmp, p);
  }
  return out;
}

PartitionMap parse_partition_map(std::string_view text, std::string_view source) {
  std::vector<PartitionMap::Entry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (line.empty() || line.front() == '#') continue;

    PartitionMap::Entry e;
    const char* p = line.data();
    const char* last = line.data() + line.size();
    auto [after_id, ec1] = std::from_chars(p, last, e.id);
    const char* q = after_id;
    while (q < last && (*q == ' ' || *q == '\t')) ++q;
    auto [after_label, ec2] = std::from_chars(q, last, e.label);
    if (ec1 != std::errc{} || ec2 != std::errc{} || q == after_id || after_label != last) {
      throw ParseError(std::string(source), line_no, "expected 'id<TAB>label' in '" + std::string(line) + "'");
    }
    entries.push_back(e);
  }
  return PartitionMap(std::move(entries));
}

PartitionMap read_partition_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_partition_map(buffer.str(), path.string());
}

void write_partition_map(const std::filesystem::path& path, const PartitionMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << format_partition_map(map);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace spinner
