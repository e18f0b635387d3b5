#pragma once

#include <filesystem>
#include <string_view>

#include "spinner/graph.hpp"

namespace spinner {

enum class EdgeListFormat {
  text,    ///< "src dst" per line, '#' comments
  binary,  ///< little-endian u64 (src, dst) pairs
};

struct EdgeListReadOptions {
  EdgeListFormat format = EdgeListFormat::text;
  /// Treat every line as an undirected pair, i.e. both directions.
  bool undirected = false;
  /// Permit files without edges (used for delta files).
  bool allow_empty = false;
};

/// Parses edge-list text. `source` names the input in error messages.
DirectedEdgeList parse_edge_list(std::string_view text, std::string_view source,
                                 const EdgeListReadOptions& options = {});

/// Reads an edge list from disk. Throws IoError, ParseError or EmptyGraphError.
DirectedEdgeList load_edge_list(const std::filesystem::path& path,
                                const EdgeListReadOptions& options = {});

void write_edge_list(const std::filesystem::path& path, const DirectedEdgeList& edges,
                     EdgeListFormat format = EdgeListFormat::text);

/// Convenience: load and convert to a weighted undirected graph.
Graph load_graph(const std::filesystem::path& path, const EdgeListReadOptions& options = {});

/// Reads a delta file (added edges only) in edge-list format.
GraphDelta load_delta(const std::filesystem::path& path, EdgeListFormat format = EdgeListFormat::text);

}  // namespace spinner
