#include "spinner/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace spinner {

namespace {

// Shortest representation that round-trips, so outputs are stable.
std::string number(double x) {
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace

std::string format_run_report(const RunReport& report, const ReportContext& context) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["mode"] = to_string(report.mode);

  const auto& c = report.config;
  doc["config"] = {
      {"k", c.k},
      {"c", c.c},
      {"epsilon", c.epsilon},
      {"window", c.window},
      {"max_iterations", c.max_iterations},
      {"seed", c.seed},
      {"workers", c.workers},
      {"score_resync_interval", c.score_resync_interval},
  };
  if (report.mode != RunMode::scratch) doc["previous_k"] = report.previous_k;

  doc["input"] = {
      {"graph", context.graph_path},
      {"vertices", context.vertices},
      {"edges", context.edges},
      {"total_weight", context.total_weight},
      {"self_loops_dropped", context.self_loops_dropped},
      {"duplicates_dropped", context.duplicates_dropped},
  };
  if (!context.partition_path.empty()) doc["partition"] = context.partition_path;

  doc["halt"] = to_string(report.halt);
  doc["iterations"] = report.iterations;
  doc["supersteps"] = report.supersteps;
  if (!report.series.empty()) {
    const auto& last = report.final_stats();
    doc["final"] = {{"phi", last.phi}, {"rho", last.rho}, {"score", last.score}};
  }
  doc["loads"] = report.loads;

  if (report.mode != RunMode::scratch) {
    ordered_json adapt;
    adapt["initial_relabeled"] = report.initial_relabeled;
    if (context.vertices > 0) {
      adapt["initial_relabeled_fraction"] =
          static_cast<double>(report.initial_relabeled) / static_cast<double>(context.vertices);
    }
    if (context.new_vertices) adapt["new_vertices"] = *context.new_vertices;
    if (context.difference_vs_previous) adapt["difference_vs_previous"] = *context.difference_vs_previous;
    if (context.scratch_iterations) {
      adapt["scratch_iterations"] = *context.scratch_iterations;
      adapt["iterations_saved"] = static_cast<std::int64_t>(*context.scratch_iterations) -
                                  static_cast<std::int64_t>(report.iterations);
    }
    if (context.scratch_difference) adapt["scratch_difference_vs_previous"] = *context.scratch_difference;
    if (context.scratch_phi) adapt["scratch_phi"] = *context.scratch_phi;
    doc[to_string(report.mode)] = adapt;
  }

  ordered_json series = ordered_json::array();
  for (const auto& s : report.series) {
    ordered_json row = {
        {"iteration", s.iteration}, {"phi", s.phi},
        {"rho", s.rho},             {"score", s.score},
        {"migrations", s.migrations}, {"candidates", s.candidates},
    };
    if (context.timings) row["seconds"] = s.seconds;
    series.push_back(row);
  }
  doc["series"] = series;
  if (context.timings) {
    doc["timings"] = {
        {"first_iteration_seconds", report.first_iteration_seconds},
        {"total_seconds", report.total_seconds},
    };
  }
  doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

std::string format_series_csv(const RunReport& report, bool timings) {
  std::string out = "iteration,phi,rho,score,migrations,candidates";
  out += timings ? ",seconds\n" : "\n";
  for (const auto& s : report.series) {
    out += std::to_string(s.iteration) + ',' + number(s.phi) + ',' + number(s.rho) + ',' + number(s.score) + ',' +
           std::to_string(s.migrations) + ',' + std::to_string(s.candidates);
    if (timings) out += ',' + number(s.seconds);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace spinner
