#pragma once
// Certification suites run by `hypermcf lemmas`: random-tensor inequality
// suites, the pinched-sample bounds, the alpha_ring and beta property sweeps,
// and the anchor values. Results are reduced shard by shard in a fixed order,
// so the report does not depend on the thread count.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypermcf/harness/config.hpp"

namespace hypermcf::harness {

struct LemmasConfig {
  std::vector<int> n{6, 8};             // dimensions of the tensor suites
  std::vector<int> q{1, 3};             // codimensions of the pinched-sample suites
  std::vector<int> section2_q{1, 2, 3}; // codimensions of the random-tensor suites
  std::vector<double> c{-1.0};
  std::int64_t samples = 100000;        // per (suite, n, q[, c])
  std::uint64_t seed = 42;
  double eps = 0.005;                   // pinched-sample margin weight
  std::vector<int> lemma32_n{5, 6, 8, 10, 13};  // n <= 5 entries are expected to fail
  std::vector<double> lemma32_c{-1.0, -0.3};
  std::vector<double> beta_c{-1.0, -4.0};
  int points_per_decade = 512;
  // Subset of: anchors section2 prop23 pinched lemma32 beta.
  std::vector<std::string> suites{"anchors", "section2", "prop23", "pinched", "lemma32", "beta"};
  int threads = 1;

  [[nodiscard]] bool runs(const std::string& suite) const;
};

[[nodiscard]] std::vector<KeySpec> lemmas_schema();
/// Validates ranges; throws ConfigError.
[[nodiscard]] LemmasConfig lemmas_config(const Config& cfg, int threads);

enum class CheckStatus { pass, fail, expected_fail, unexpected_pass };
[[nodiscard]] const char* to_string(CheckStatus s);

struct CheckResult {
  std::string suite;
  std::string name;
  nlohmann::json params;    // n, q, c, ...
  std::string criterion;    // e.g. "min margin/scale >= -1e-9"
  double worst = 0;         // normalised worst value over the samples or grid
  nlohmann::json witness;   // where the worst value occurred
  std::int64_t evaluations = 0;
  CheckStatus status = CheckStatus::fail;
};

struct LemmasReport {
  std::vector<CheckResult> checks;
  [[nodiscard]] bool ok() const;
  [[nodiscard]] nlohmann::json to_json(const LemmasConfig& cfg) const;
};

/// Runs every suite. `progress` (optional) receives one line per finished suite.
[[nodiscard]] LemmasReport run_lemmas(const LemmasConfig& cfg,
                                      const std::function<void(const std::string&)>& progress = {});

/// Splits [0, total) into fixed-size shards, runs `body(shard, begin, end)` on up
/// to `threads` workers and returns when all shards are done. Shard boundaries
/// depend only on `total` and `shard_size`.
void for_each_shard(std::int64_t total, std::int64_t shard_size, int threads,
                    const std::function<void(std::int64_t shard, std::int64_t begin, std::int64_t end)>& body);

/// HYPERMCF_THREADS when set and positive, otherwise `fallback`.
[[nodiscard]] int threads_from_env(int fallback);

}  // namespace hypermcf::harness
