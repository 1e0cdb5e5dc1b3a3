#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ecodec/errors.hpp"
#include "ecodec/evolution.hpp"
#include "ecodec/metrics.hpp"
#include "ecodec/world.hpp"

namespace ecodec {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

}  // namespace detail

/// Write via a sibling temp file and rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Columns: generation,best_scalar,best_coverage,best_cost
inline std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "generation,best_scalar,best_coverage,best_cost\n";
  for (const auto& r : trace) {
    out += std::to_string(r.generation) + ',' + detail::fmt_double(r.best_scalar) + ',' +
           detail::fmt_double(r.best_coverage) + ',' + detail::fmt_double(r.best_cost) + '\n';
  }
  return out;
}

/// Columns: tick,clock,requests,executed,reached_target,median_generations,
/// intra_mean,inter_mean,alignment_ratio,components,isolated,connections,
/// pool_occupancy,distinct_genes
inline std::string timeline_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "tick,clock,requests,executed,reached_target,median_generations,intra_mean,inter_mean,alignment_ratio,"
      "components,isolated,connections,pool_occupancy,distinct_genes\n";
  for (const auto& r : rows) {
    out += std::to_string(r.tick) + ',' + std::to_string(r.clock) + ',' + std::to_string(r.requests) + ',' +
           std::to_string(r.executed) + ',' + std::to_string(r.reached_target) + ',' +
           detail::fmt_optional(r.median_generations) + ',' + detail::fmt_double(r.alignment.intra_mean) + ',' +
           detail::fmt_double(r.alignment.inter_mean) + ',' + detail::fmt_double(r.alignment.ratio) + ',' +
           std::to_string(r.components) + ',' + std::to_string(r.isolated) + ',' + std::to_string(r.connections) +
           ',' + std::to_string(r.pool_occupancy) + ',' + std::to_string(r.distinct_genes) + '\n';
  }
  return out;
}

/// Columns: tick,clock,user,habitat,status,reached_target,generations,coverage,
/// total_cost,scalar,solution_size
inline std::string outcomes_csv(const std::vector<RequestOutcome>& outcomes) {
  std::string out = "tick,clock,user,habitat,status,reached_target,generations,coverage,total_cost,scalar,solution_size\n";
  for (const auto& o : outcomes) {
    out += std::to_string(o.tick) + ',' + std::to_string(o.clock) + ',' + to_string(o.user) + ',' +
           to_string(o.habitat) + ',' + to_string(o.status) + ',' + (o.reached_target ? "1" : "0") + ',' +
           std::to_string(o.generations) + ',' + detail::fmt_double(o.fitness.coverage) + ',' +
           detail::fmt_double(o.fitness.total_cost) + ',' + detail::fmt_double(o.fitness.scalar) + ',' +
           std::to_string(o.solution.size()) + '\n';
  }
  return out;
}

/// Plain weighted edge list, one "source target probability" line per edge.
inline std::string edge_list(const TopologySnapshot& s) {
  std::string out = "# source target probability\n";
  for (const auto& e : s.edges)
    out += to_string(e.source) + ' ' + to_string(e.target) + ' ' + detail::fmt_double(e.probability) + '\n';
  return out;
}

inline std::string event_log_text(const std::vector<Event>& log) {
  std::string out;
  for (const auto& e : log) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

}  // namespace ecodec
