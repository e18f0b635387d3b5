#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spinner/partitioner.hpp"

namespace spinner {

inline constexpr int kReportSchemaVersion = 1;

/// Context written next to a run report.
struct ReportContext {
  std::string graph_path;
  std::string partition_path;
  std::size_t vertices = 0;
  std::uint64_t edges = 0;
  std::uint64_t total_weight = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;

  /// Adapt and elastic runs: fraction of common vertices whose final label
  /// differs from the previous assignment.
  std::optional<double> difference_vs_previous;
  /// Adapt runs: vertices added by the delta.
  std::optional<std::size_t> new_vertices;
  /// Filled when a from-scratch run was made for comparison.
  std::optional<std::size_t> scratch_iterations;
  std::optional<double> scratch_difference;
  std::optional<double> scratch_phi;

  /// Include wall times. Off by default so reports are reproducible byte for byte.
  bool timings = false;
};

/// JSON document: schema version, config echo, halt reason, per-iteration
/// series and final metrics.
std::string format_run_report(const RunReport& report, const ReportContext& context);

/// CSV with header "iteration,phi,rho,score,migrations,candidates" and a
/// trailing "seconds" column when timings are on.
std::string format_series_csv(const RunReport& report, bool timings = false);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spinner
