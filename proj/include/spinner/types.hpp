#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace spinner {

/// Vertex identifier as it appears in input files.
using VertexId = std::uint64_t;
/// Dense internal vertex index in [0, |V|).
using VertexIndex = std::uint32_t;
/// Partition label in [0, k).
using Label = std::uint32_t;
/// Undirected edge weight: number of directed edges between the endpoints (1 or 2).
using EdgeWeight = std::uint8_t;

inline constexpr Label kNoLabel = std::numeric_limits<Label>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable file.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (k = 0, c <= 1, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent inputs, e.g. a previous assignment that does not cover the graph.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinner
