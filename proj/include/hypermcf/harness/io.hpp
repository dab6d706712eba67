#pragma once
// Output formats: 17-significant-digit CSV, JSON documents, hand-emitted SVG
// polyline charts, and atomic file replacement.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypermcf/flow_trace.hpp"

namespace hypermcf::harness {

/// printf("%.17g"); non-finite values become "inf", "-inf" or "nan".
[[nodiscard]] std::string format_double(double v);

/// Finite doubles as numbers, non-finite ones as null.
[[nodiscard]] nlohmann::json json_number(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Header line plus one line per row, columns in TraceRow order.
[[nodiscard]] std::string trace_csv(const FlowTrace& trace);

/// Parses a CSV written by trace_csv. Throws ConfigError on a schema mismatch.
[[nodiscard]] std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Single-series line chart; non-finite points are skipped.
[[nodiscard]] std::string svg_polyline_chart(const std::string& title, const std::string& x_label,
                                             const std::vector<double>& x, const std::vector<double>& y);

/// One SVG per monitor column (all columns except t) into `dir`.
void write_trace_plots(const std::filesystem::path& dir, const std::vector<TraceRow>& rows);

/// Deterministic pretty JSON with a trailing newline.
[[nodiscard]] std::string dump_json(const nlohmann::json& j);

}  // namespace hypermcf::harness
