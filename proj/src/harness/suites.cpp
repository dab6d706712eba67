#include "hypermcf/harness/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "hypermcf/curvature.hpp"
#include "hypermcf/errors.hpp"
#include "hypermcf/flow_equivariant.hpp"
#include "hypermcf/harness/io.hpp"
#include "hypermcf/pinching.hpp"
#include "hypermcf/profiles.hpp"

namespace hypermcf::harness {

namespace {

constexpr std::int64_t kShardSize = 4096;

// Human-readable number for criterion text and progress lines.
std::string brief(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Running minimum of a normalised margin with the sample index that produced it.
struct Worst {
  double value = std::numeric_limits<double>::infinity();
  std::int64_t index = -1;
  void take(double v, std::int64_t i) {
    // NaN counts as the worst possible value.
    if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
    if (v < value) {
      value = v;
      index = i;
    }
  }
  void merge(const Worst& o) {
    if (o.value < value || (o.value == value && o.index < index && o.index >= 0)) *this = o;
  }
};

enum class Kind { margin, positive, residual };

struct CheckDef {
  const char* name;
  double tolerance;
  Kind kind;  // margin: worst >= -tol; positive: worst > 0; residual: max |r| < tol
};

// Runs `samples` evaluations of `eval(rng, index, out)` where `out` holds one
// normalised margin per check, then turns the per-check minima into results.
template <class Eval>
std::vector<CheckResult> sampled_suite(const std::string& suite, const nlohmann::json& params,
                                       const std::vector<CheckDef>& defs, std::uint64_t seed, std::int64_t samples,
                                       int threads, Eval eval) {
  const std::int64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::vector<std::vector<Worst>> per_shard(static_cast<std::size_t>(shards), std::vector<Worst>(defs.size()));
  for_each_shard(samples, kShardSize, threads, [&](std::int64_t shard, std::int64_t begin, std::int64_t end) {
    Rng rng(shard_seed(seed, static_cast<std::uint64_t>(shard)));
    auto& acc = per_shard[static_cast<std::size_t>(shard)];
    std::vector<double> out(defs.size());
    for (std::int64_t i = begin; i < end; ++i) {
      eval(rng, out);
      for (std::size_t k = 0; k < defs.size(); ++k) acc[k].take(out[k], i);
    }
  });
  std::vector<Worst> total(defs.size());
  for (const auto& s : per_shard)
    for (std::size_t k = 0; k < defs.size(); ++k) total[k].merge(s[k]);

  std::vector<CheckResult> results;
  for (std::size_t k = 0; k < defs.size(); ++k) {
    CheckResult r;
    r.suite = suite;
    r.name = defs[k].name;
    r.params = params;
    std::ostringstream crit;
    switch (defs[k].kind) {
      case Kind::margin: crit << "min margin/scale >= -" << brief(defs[k].tolerance); break;
      case Kind::positive: crit << "min margin > 0"; break;
      case Kind::residual: crit << "max |residual|/scale < " << brief(defs[k].tolerance); break;
    }
    r.criterion = crit.str();
    r.worst = total[k].value;
    r.witness = {{"sample", total[k].index}, {"seed", seed}};
    r.evaluations = samples;
    bool ok = false;
    switch (defs[k].kind) {
      case Kind::margin: ok = r.worst >= -defs[k].tolerance; break;
      case Kind::positive: ok = r.worst > 0.0; break;
      case Kind::residual: ok = r.worst > -defs[k].tolerance; break;
    }
    r.status = ok ? CheckStatus::pass : CheckStatus::fail;
    if (defs[k].kind == Kind::residual) r.worst = -r.worst;  // report the residual itself
    results.push_back(std::move(r));
  }
  return results;
}

std::uint64_t suite_seed(std::uint64_t base, int suite, int n, int q, std::size_t c_index) {
  return shard_seed(base, static_cast<std::uint64_t>(suite) * 1'000'000ULL + static_cast<std::uint64_t>(n) * 1000ULL +
                              static_cast<std::uint64_t>(q) * 10ULL + c_index);
}

// Random tensor with i.i.d. normal entries rescaled by 10^U(-1, 1), so the suites
// see |H| both below and above the regime boundary.
SecondFundamentalForm scaled_random_tensor(int n, int q, Rng& rng) {
  auto h = random_tensor(n, q, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = std::pow(10.0, u(rng));
  std::vector<Eigen::MatrixXd> blocks = h.blocks();
  for (auto& b : blocks) b *= s;
  return SecondFundamentalForm(std::move(blocks));
}

std::vector<CheckResult> section2_suite(const LemmasConfig& cfg, int n, int q) {
  const std::vector<CheckDef> defs{
      {"cauchy_schwarz_p1q1", 1e-9, Kind::margin}, {"offdiag_2p1q2", 1e-9, Kind::margin},
      {"normal_block_p2", 1e-9, Kind::margin},     {"r1_minus_r2", 1e-9, Kind::margin},
      {"r2_identity", 1e-10, Kind::residual},      {"r2_frame_identity", 1e-10, Kind::residual},
      {"reaction_identity", 1e-10, Kind::residual},
  };
  const double c = cfg.c.front();
  return sampled_suite("section2", {{"n", n}, {"q", q}, {"c", c}}, defs, suite_seed(cfg.seed, 1, n, q, 0),
                       cfg.samples, cfg.threads, [&](Rng& rng, std::vector<double>& out) {
                         const auto h = scaled_random_tensor(n, q, rng);
                         const auto m = inequality_suite_section2(h);
                         out[0] = m.cauchy_schwarz_p1q1 / m.scale;
                         out[1] = m.offdiag_2p1q2 / m.scale;
                         out[2] = m.normal_block_p2 / m.scale;
                         out[3] = m.r1_minus_r2 / m.scale;
                         out[4] = -std::abs(m.r2_identity_residual) / m.scale;
                         out[5] = -std::abs(m.r2_frame_residual) / m.scale;
                         const auto r = reaction_terms(h, c);
                         out[6] = -std::abs(r.r_ho - (r.r_h - r.r_H / n)) / tolerance_scale(h, 4);
                       });
}

std::vector<CheckResult> cubic_suite(const LemmasConfig& cfg, int n) {
  const std::vector<CheckDef> defs{{"cubic_bound", 1e-10, Kind::margin}};
  auto results = sampled_suite("prop23", {{"n", n}}, defs, suite_seed(cfg.seed, 2, n, 0, 0), cfg.samples,
                               cfg.threads, [&](Rng& rng, std::vector<double>& out) {
                                 std::normal_distribution<double> g;
                                 std::vector<double> a(static_cast<std::size_t>(n)), b(a.size());
                                 double sa = 0, sb = 0;
                                 for (std::size_t i = 0; i < a.size(); ++i) {
                                   a[i] = g(rng);
                                   b[i] = g(rng);
                                   sa += a[i];
                                   sb += b[i];
                                 }
                                 for (std::size_t i = 0; i < a.size(); ++i) {
                                   a[i] -= sa / n;
                                   b[i] -= sb / n;
                                 }
                                 const auto r = cubic_bound(a, b);
                                 out[0] = r.margin / r.scale;
                               });

  // Equality cases: n-1 coinciding pairs with a = b, the same pattern with the
  // two vectors scaled independently, and b = 0.
  CheckResult eq;
  eq.suite = "prop23";
  eq.name = "equality_cases";
  eq.params = {{"n", n}};
  eq.criterion = "equality flagged and |margin|/scale <= 1e-10";
  eq.worst = 0;
  bool all = true;
  std::vector<double> base(static_cast<std::size_t>(n), 1.0);
  base.back() = -(n - 1.0);
  const std::vector<std::pair<double, double>> scalings{{1.0, 1.0}, {2.5, 0.3}, {-1.0, 4.0}};
  for (auto [sa, sb] : scalings) {
    std::vector<double> a(base), b(base);
    for (auto& v : a) v *= sa;
    for (auto& v : b) v *= sb;
    const auto r = cubic_bound(a, b);
    eq.worst = std::max(eq.worst, std::abs(r.margin) / r.scale);
    all = all && r.equality && std::abs(r.margin) <= 1e-10 * r.scale;
    ++eq.evaluations;
  }
  std::vector<double> t(static_cast<std::size_t>(n), 0.0), z(t);
  t[0] = 1.0;
  t[1] = -3.0;
  t[2] = 2.0;
  const auto r0 = cubic_bound(t, z);
  all = all && r0.equality && r0.margin == 0.0;
  ++eq.evaluations;
  eq.witness = nlohmann::json::object();
  eq.status = all ? CheckStatus::pass : CheckStatus::fail;
  results.push_back(eq);
  return results;
}

std::vector<CheckResult> pinched_suite(const LemmasConfig& cfg, int n, int q, double c, std::size_t ci) {
  const std::vector<CheckDef> defs{
      {"pinch_margin", 0.0, Kind::positive},   {"W_lower_bound", 1e-9, Kind::margin},
      {"ricci_bound", 1e-9, Kind::margin},     {"ricci_final", 1e-9, Kind::margin},
      {"reaction_identity", 1e-10, Kind::residual},
  };
  const PinchingProfile prof(n, c);
  const double eps = cfg.eps;
  return sampled_suite("pinched", {{"n", n}, {"q", q}, {"c", c}, {"eps", eps}}, defs,
                       suite_seed(cfg.seed, 3, n, q, ci), cfg.samples, cfg.threads,
                       [&](Rng& rng, std::vector<double>& out) {
                         const auto h = random_pinched_sample(n, q, c, eps, rng);
                         const double s4 = tolerance_scale(h, 4);
                         const double s2 = tolerance_scale(h, 2);
                         out[0] = pinch_margin(prof, h, eps);
                         out[1] = W_lower_bound_check(h, c, eps) / s4;
                         const auto rb = ricci_bound_check(h, c, eps);
                         out[2] = rb.bound_margin / s2;
                         out[3] = rb.final_margin / s2;
                         const auto r = reaction_terms(h, c);
                         out[4] = -std::abs(r.r_ho - (r.r_h - r.r_H / n)) / s4;
                       });
}

CheckResult tube_boundary_check(int n, double c) {
  const TubeState st{n, 1, c, std::atanh(0.5) / std::sqrt(-c), 0.0};
  const auto h = tube_second_fundamental_form(st);
  const double w = W_lower_bound_check(h, c, 0.0);
  const auto rb = ricci_bound_check(h, c, 0.0);
  const double s = tolerance_scale(h, 4);
  CheckResult r;
  r.suite = "pinched";
  r.name = "tube_boundary_zero";
  r.params = {{"n", n}, {"c", c}};
  r.criterion = "W bound and Ricci final margin vanish to round-off (|value|/scale <= 1e-14)";
  r.worst = std::max(std::abs(w), std::abs(rb.final_margin)) / s;
  r.witness = {{"W_margin", json_number(w)}, {"ricci_final", json_number(rb.final_margin)}};
  r.evaluations = 1;
  r.status = r.worst <= 1e-14 ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

std::vector<CheckResult> lemma32_suite(const LemmasConfig& cfg, int n, double c) {
  const PinchingProfile prof(n, c);
  const auto grid = default_sweep_grid(prof.regime_boundary(), c, cfg.points_per_decade);
  const auto npts = static_cast<std::int64_t>(grid.points().size());
  std::vector<CheckResult> out;
  if (n <= 5) {
    CheckResult r;
    r.suite = "lemma32";
    r.name = "violation_witness";
    r.params = {{"n", n}, {"c", c}, {"grid", grid.describe()}};
    r.criterion = "some inequality margin is negative (the properties are claimed only for n >= 6)";
    r.evaluations = npts;
    const auto w = find_lemma32_violation(prof, grid);
    if (w) {
      r.worst = w->margin;
      r.witness = {{"n", w->n}, {"c", w->c}, {"y", w->y}, {"property", w->property}, {"margin", w->margin}};
      r.status = CheckStatus::expected_fail;
    } else {
      r.worst = 0;
      r.witness = nullptr;
      r.status = CheckStatus::unexpected_pass;
    }
    out.push_back(std::move(r));
    return out;
  }
  for (const auto& cert : certify_lemma32(prof, grid)) {
    CheckResult r;
    r.suite = "lemma32";
    r.name = cert.name;
    r.params = {{"n", n}, {"c", c}, {"grid", cert.grid}};
    r.criterion = cert.name.rfind("identity", 0) == 0 ? "|residual| < 1e-9 max(1, y^2)" : "margin > 0";
    r.worst = cert.min_margin;
    r.witness = {{"y", json_number(cert.argmin)}};
    r.evaluations = npts;
    r.status = cert.passed ? CheckStatus::pass : CheckStatus::fail;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> beta_suite_checks(const LemmasConfig& cfg, double c) {
  const auto grid = default_sweep_grid(-25.0 * c, c, cfg.points_per_decade);
  std::vector<CheckResult> out;
  for (const auto& cert : certify_beta(c, grid)) {
    CheckResult r;
    r.suite = "beta";
    r.name = cert.name;
    r.params = {{"n", 5}, {"c", c}, {"grid", cert.grid}};
    r.criterion = "margin > 0";
    r.worst = cert.min_margin;
    r.witness = {{"x", json_number(cert.argmin)}};
    r.evaluations = static_cast<std::int64_t>(grid.points().size());
    r.status = cert.passed ? CheckStatus::pass : CheckStatus::fail;
    out.push_back(std::move(r));
  }
  return out;
}

CheckResult anchor(const std::string& name, double value, double expected, double tol, bool relative,
                   nlohmann::json params) {
  CheckResult r;
  r.suite = "anchors";
  r.name = name;
  r.params = std::move(params);
  const double err = relative ? std::abs(value - expected) / std::abs(expected) : std::abs(value - expected);
  r.criterion = std::string(relative ? "relative" : "absolute") + " error <= " + brief(tol);
  r.worst = err;
  r.witness = {{"value", json_number(value)}, {"expected", expected}};
  r.evaluations = 1;
  r.status = err <= tol ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

std::vector<CheckResult> anchors() {
  std::vector<CheckResult> out;
  out.push_back(anchor("alpha_tube_value", alpha(6, std::sqrt(110.25), -1.0), 20.25, 1e-12, true,
                       {{"n", 6}, {"c", -1.0}, {"H", "sqrt(110.25)"}}));
  out.push_back(anchor("alpha_ring_at_boundary", PinchingProfile(6, -1.0).alpha_ring(36.0), 0.0, 1e-10, false,
                       {{"n", 6}, {"c", -1.0}, {"y", 36.0}}));
  const double b50 = beta(50.0, -1.0);
  out.push_back(anchor("beta_value", b50, 10.74045, 1e-5, false, {{"c", -1.0}, {"x", 50.0}}));
  CheckResult cmp;
  cmp.suite = "anchors";
  cmp.name = "beta_above_quarter_line";
  cmp.params = {{"c", -1.0}, {"x", 50.0}};
  cmp.criterion = "x/4 + 2c < beta(x)";
  cmp.worst = b50 - 10.5;
  cmp.witness = {{"beta", b50}, {"line", 10.5}};
  cmp.evaluations = 1;
  cmp.status = 10.5 < b50 ? CheckStatus::pass : CheckStatus::fail;
  out.push_back(cmp);
  return out;
}

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::expected_fail: return "expected-fail";
    case CheckStatus::unexpected_pass: return "unexpected-pass";
  }
  return "fail";
}

std::vector<KeySpec> lemmas_schema() {
  return {
      {"n", "6,8", "dimensions of the tensor suites (>= 6 for the pinched suites)"},
      {"q", "1,3", "codimensions of the pinched-sample suites"},
      {"section2_q", "1,2,3", "codimensions of the random-tensor inequality suites"},
      {"c", "-1", "ambient curvatures (< 0)"},
      {"samples", "100000", "samples per suite and parameter combination"},
      {"seed", "42", "base seed"},
      {"eps", "0.005", "margin weight of the pinched-sample suites"},
      {"lemma32_n", "5,6,8,10,13", "dimensions of the alpha_ring sweeps; n <= 5 is reported as expected-fail"},
      {"lemma32_c", "-1,-0.3", "ambient curvatures of the alpha_ring sweeps"},
      {"beta_c", "-1,-4", "ambient curvatures of the n = 5 beta sweeps"},
      {"points_per_decade", "512", "log-grid density of the sweeps"},
      {"suites", "anchors,section2,prop23,pinched,lemma32,beta", "suites to run"},
  };
}

LemmasConfig lemmas_config(const Config& cfg, int threads) {
  LemmasConfig out;
  out.n = cfg.integers("n");
  out.q = cfg.integers("q");
  out.section2_q = cfg.integers("section2_q");
  out.c = cfg.reals("c");
  out.samples = cfg.integer("samples");
  const auto seed = cfg.integer("seed");
  if (seed < 0) throw ConfigError("seed must be >= 0");
  out.seed = static_cast<std::uint64_t>(seed);
  out.eps = cfg.real("eps");
  out.lemma32_n = cfg.integers("lemma32_n");
  out.lemma32_c = cfg.reals("lemma32_c");
  out.beta_c = cfg.reals("beta_c");
  const auto ppd = cfg.integer("points_per_decade");
  if (ppd < 1 || ppd > 100000) throw ConfigError("points_per_decade must lie in [1, 100000]");
  out.points_per_decade = static_cast<int>(ppd);
  out.threads = threads;
  out.suites.clear();
  {
    std::stringstream ss(cfg.str("suites"));
    std::string item;
    const std::vector<std::string> known{"anchors", "section2", "prop23", "pinched", "lemma32", "beta"};
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      if (std::find(known.begin(), known.end(), item) == known.end()) throw ConfigError("unknown suite '" + item + "'");
      out.suites.push_back(item);
    }
    if (out.suites.empty()) throw ConfigError("suites: empty list");
  }

  for (int n : out.n)
    if (n < 6) throw ConfigError("n must be >= 6 for the tensor suites");
  for (int q : out.q)
    if (q < 1) throw ConfigError("q must be >= 1");
  for (int q : out.section2_q)
    if (q < 1) throw ConfigError("section2_q must be >= 1");
  for (double c : out.c)
    if (!(c < 0.0)) throw ConfigError("c must be negative");
  for (int n : out.lemma32_n)
    if (n < 3) throw ConfigError("lemma32_n must be >= 3");
  for (double c : out.lemma32_c)
    if (!(c < 0.0)) throw ConfigError("lemma32_c must be negative");
  for (double c : out.beta_c)
    if (!(c < 0.0)) throw ConfigError("beta_c must be negative");
  if (out.samples < 1) throw ConfigError("samples must be >= 1");
  if (!(out.eps >= 0.0)) throw ConfigError("eps must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  return out;
}

bool LemmasConfig::runs(const std::string& suite) const {
  return std::find(suites.begin(), suites.end(), suite) != suites.end();
}

bool LemmasReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& r) {
    return r.status == CheckStatus::pass || r.status == CheckStatus::expected_fail;
  });
}

nlohmann::json LemmasReport::to_json(const LemmasConfig& cfg) const {
  nlohmann::json j;
  j["command"] = "lemmas";
  j["config"] = {{"n", cfg.n},
                 {"q", cfg.q},
                 {"section2_q", cfg.section2_q},
                 {"c", cfg.c},
                 {"samples", cfg.samples},
                 {"seed", cfg.seed},
                 {"eps", cfg.eps},
                 {"lemma32_n", cfg.lemma32_n},
                 {"lemma32_c", cfg.lemma32_c},
                 {"beta_c", cfg.beta_c},
                 {"points_per_decade", cfg.points_per_decade},
                 {"suites", cfg.suites}};
  nlohmann::json list = nlohmann::json::array();
  int counts[4] = {0, 0, 0, 0};
  for (const auto& r : checks) {
    ++counts[static_cast<int>(r.status)];
    list.push_back({{"suite", r.suite},
                    {"name", r.name},
                    {"params", r.params},
                    {"criterion", r.criterion},
                    {"worst", json_number(r.worst)},
                    {"witness", r.witness},
                    {"evaluations", r.evaluations},
                    {"status", to_string(r.status)}});
  }
  j["checks"] = list;
  j["summary"] = {{"pass", counts[0]},
                  {"fail", counts[1]},
                  {"expected_fail", counts[2]},
                  {"unexpected_pass", counts[3]},
                  {"ok", ok()}};
  return j;
}

LemmasReport run_lemmas(const LemmasConfig& cfg, const std::function<void(const std::string&)>& progress) {
  LemmasReport rep;
  auto add = [&](std::vector<CheckResult> v, const std::string& what) {
    for (auto& r : v) rep.checks.push_back(std::move(r));
    if (progress) progress(what);
  };
  if (cfg.runs("anchors")) add(anchors(), "anchors");
  if (cfg.runs("section2")) {
    for (int n : cfg.n)
      for (int q : cfg.section2_q)
        add(section2_suite(cfg, n, q), "section2 n=" + std::to_string(n) + " q=" + std::to_string(q));
  }
  if (cfg.runs("prop23"))
    for (int n : cfg.n) add(cubic_suite(cfg, n), "prop23 n=" + std::to_string(n));
  for (int n : cfg.runs("pinched") ? cfg.n : std::vector<int>{}) {
    for (int q : cfg.q) {
      for (std::size_t ci = 0; ci < cfg.c.size(); ++ci) {
        add(pinched_suite(cfg, n, q, cfg.c[ci], ci),
            "pinched n=" + std::to_string(n) + " q=" + std::to_string(q) + " c=" + brief(cfg.c[ci]));
      }
    }
    for (double c : cfg.c) add({tube_boundary_check(n, c)}, "tube boundary n=" + std::to_string(n));
  }
  for (int n : cfg.runs("lemma32") ? cfg.lemma32_n : std::vector<int>{})
    for (double c : cfg.lemma32_c) add(lemma32_suite(cfg, n, c), "lemma32 n=" + std::to_string(n) + " c=" + brief(c));
  for (double c : cfg.runs("beta") ? cfg.beta_c : std::vector<double>{}) add(beta_suite_checks(cfg, c), "beta c=" + brief(c));
  return rep;
}

void for_each_shard(std::int64_t total, std::int64_t shard_size, int threads,
                    const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body) {
  const std::int64_t shards = (total + shard_size - 1) / shard_size;
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::int64_t s = next.fetch_add(1);
      if (s >= shards) return;
      try {
        body(s, s * shard_size, std::min(total, (s + 1) * shard_size));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = shards;
      }
    }
  };
  const int workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, shards)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

int threads_from_env(int fallback) {
  if (const char* v = std::getenv("HYPERMCF_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0 && n <= 1024) return static_cast<int>(n);
    throw ConfigError(std::string("HYPERMCF_THREADS must be a positive integer, got '") + v + "'");
  }
  return fallback;
}

}  // namespace hypermcf::harness
