#pragma once
// The four CLI subcommands as library functions returning the process exit code:
//   0  success
//   2  a checked invariant or certification item failed (or a run-time error)
//   3  invalid configuration or input

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypermcf/harness/config.hpp"

namespace hypermcf::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitConfig = 3;

struct CommandOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;  // "key=value"
  std::optional<std::uint64_t> seed;   // overrides the seed key
  std::filesystem::path out = "hypermcf_out";
  bool plot = false;
  int threads = 1;
};

[[nodiscard]] std::vector<KeySpec> flow_schema();
[[nodiscard]] std::vector<KeySpec> sample_tensors_schema();

/// Writes lemmas_report.json and manifest.json into `out`.
[[nodiscard]] int cmd_lemmas(const CommandOptions& opt, std::ostream& log);
/// Writes trace.csv, manifest.json and (with plot) plots/*.svg into `out`.
[[nodiscard]] int cmd_flow(const CommandOptions& opt, std::ostream& log);
/// Writes tensors.ndjson and manifest.json into `out`.
[[nodiscard]] int cmd_sample_tensors(const CommandOptions& opt, std::ostream& log);
/// Summarises an existing run directory (`out`); with plot, redraws its trace.
[[nodiscard]] int cmd_report(const CommandOptions& opt, std::ostream& log);

/// The manifest without its wall-clock fields, for reproducibility comparisons.
[[nodiscard]] nlohmann::json strip_wall_time(nlohmann::json manifest);

}  // namespace hypermcf::harness
