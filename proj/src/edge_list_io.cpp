#include "spinner/edge_list_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spinner {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == ','; }

std::string_view next_token(std::string_view& line) {
  std::size_t i = 0;
  while (i < line.size() && is_space(line[i])) ++i;
  std::size_t j = i;
  while (j < line.size() && !is_space(line[j])) ++j;
  std::string_view token = line.substr(i, j - i);
  line.remove_prefix(j);
  return token;
}

std::vector<DirectedEdge> parse_text(std::string_view text, std::string_view source) {
  std::vector<DirectedEdge> raw;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);

    std::string_view rest = line;
    std::string_view first = next_token(rest);
    if (first.empty() || first.front() == '#' || first.front() == '%') continue;
    std::string_view second = next_token(rest);
    std::string_view extra = next_token(rest);
    auto fail = [&](const std::string& why) {
      throw ParseError(std::string(source), line_no, why + " in '" + std::string(line) + "'");
    };
    if (second.empty()) fail("expected two vertex ids");
    if (!extra.empty()) fail("unexpected extra field");
    DirectedEdge e;
    for (auto [token, out] : {std::pair{first, &e.source}, std::pair{second, &e.target}}) {
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), *out);
      if (ec != std::errc{} || ptr != token.data() + token.size()) fail("invalid vertex id");
    }
    raw.push_back(e);
  }
  return raw;
}

std::uint64_t load_le64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

void store_le64(char* p, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  std::memcpy(p, &v, sizeof v);
}

std::vector<DirectedEdge> parse_binary(std::string_view bytes, std::string_view source) {
  if (bytes.size() % 16 != 0) {
    throw ParseError(std::string(source), 0,
                     "binary edge list size " + std::to_string(bytes.size()) +
                         " is not a multiple of 16 bytes");
  }
  std::vector<DirectedEdge> raw(bytes.size() / 16);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i].source = load_le64(bytes.data() + 16 * i);
    raw[i].target = load_le64(bytes.data() + 16 * i + 8);
  }
  return raw;
}

}  // namespace

DirectedEdgeList parse_edge_list(std::string_view text, std::string_view source,
                                 const EdgeListReadOptions& options) {
  std::vector<DirectedEdge> raw = options.format == EdgeListFormat::text
                                      ? parse_text(text, source)
                                      : parse_binary(text, source);
  if (raw.empty() && !options.allow_empty) {
    throw EmptyGraphError("'" + std::string(source) + "' contains no edges");
  }
  return DirectedEdgeList::from_raw(std::move(raw), options.undirected);
}

DirectedEdgeList load_edge_list(const std::filesystem::path& path,
                                const EdgeListReadOptions& options) {
  const std::string contents = read_file(path);
  return parse_edge_list(contents, path.string(), options);
}

void write_edge_list(const std::filesystem::path& path, const DirectedEdgeList& list,
                     EdgeListFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (format == EdgeListFormat::binary) {
    std::vector<char> buffer(16 * list.edges.size());
    for (std::size_t i = 0; i < list.edges.size(); ++i) {
      store_le64(buffer.data() + 16 * i, list.edges[i].source);
      store_le64(buffer.data() + 16 * i + 8, list.edges[i].target);
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  } else {
    std::string buffer;
    buffer.reserve(list.edges.size() * 16);
    char tmp[48];
    for (const auto& e : list.edges) {
      char* p = std::to_chars(tmp, tmp + 20, e.source).ptr;
      *p++ = ' ';
      p = std::to_chars(p, p + 20, e.target).ptr;
      *p++ = '\n';
      buffer.append(tmp, p);
    }
    out << buffer;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Graph load_graph(const std::filesystem::path& path, const EdgeListReadOptions& options) {
  return to_undirected(load_edge_list(path, options));
}

GraphDelta load_delta(const std::filesystem::path& path, EdgeListFormat format) {
  EdgeListReadOptions options;
  options.format = format;
  options.allow_empty = true;
  GraphDelta delta;
  delta.added = load_edge_list(path, options).edges;
  return delta;
}

}  // namespace spinner
