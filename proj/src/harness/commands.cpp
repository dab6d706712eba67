#include "hypermcf/harness/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hypermcf/errors.hpp"
#include "hypermcf/flow_axisym.hpp"
#include "hypermcf/flow_equivariant.hpp"
#include "hypermcf/harness/io.hpp"
#include "hypermcf/harness/suites.hpp"
#include "hypermcf/pinching.hpp"

#ifndef HYPERMCF_VERSION
#define HYPERMCF_VERSION "0.0.0"
#endif

namespace hypermcf::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Config load(std::vector<KeySpec> schema, const CommandOptions& opt) {
  Config cfg(std::move(schema));
  if (opt.config_path) cfg.load_file(*opt.config_path);
  for (const auto& o : opt.overrides) cfg.set(o);
  if (opt.seed) {
    bool has_seed = false;
    for (const auto& k : cfg.schema()) has_seed = has_seed || k.name == "seed";
    if (has_seed) cfg.set("seed", std::to_string(*opt.seed));
  }
  return cfg;
}

json config_echo(const Config& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries()) j[k] = v;
  return j;
}

json manifest_head(const std::string& command, const Config& cfg, const std::string& start) {
  return {{"artifact", "hypermcf"},
          {"version", HYPERMCF_VERSION},
          {"command", command},
          {"config", config_echo(cfg)},
          {"wall_time", {{"start", start}, {"end", nullptr}}}};
}

void finish_manifest(json& m, const fs::path& out) {
  m["wall_time"]["end"] = utc_now();
  atomic_write(out / "manifest.json", dump_json(m));
}

template <class Body>
int guarded(std::ostream& log, const char* command, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << command << ": configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    log << command << ": invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    log << command << ": invariant violated: " << e.what() << "\n";
    return kExitViolation;
  } catch (const Error& e) {
    log << command << ": " << e.what() << "\n";
    return kExitViolation;
  } catch (const fs::filesystem_error& e) {
    log << command << ": " << e.what() << "\n";
    return kExitViolation;
  }
}

// --- flow ------------------------------------------------------------------------

struct Check {
  std::string name;
  double value;
  std::string criterion;
  bool pass;
};

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) {
    a.push_back({{"name", c.name}, {"value", json_number(c.value)}, {"criterion", c.criterion}, {"pass", c.pass}});
  }
  return a;
}

// Per-column minimum and maximum with the time at which each occurs.
json column_extrema(const std::vector<TraceRow>& rows) {
  json j = json::object();
  if (rows.empty()) return j;
  const auto get = [](const TraceRow& r, std::size_t i) {
    const double f[] = {r.t,           r.H_min,           r.H_max,          r.h_sq_max, r.ho_sq_max, r.pinch_margin_min,
                        r.f_sigma_max, r.thm41_ratio_max, r.grad_ratio_max, r.diam,     r.x0_max,    r.x0_bound};
    return f[i];
  };
  for (std::size_t i = 1; i < std::size(kTraceColumns); ++i) {
    std::size_t imin = 0, imax = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (get(rows[k], i) < get(rows[imin], i)) imin = k;
      if (get(rows[k], i) > get(rows[imax], i)) imax = k;
    }
    j[kTraceColumns[i]] = {{"min", json_number(get(rows[imin], i))},
                           {"argmin_t", json_number(rows[imin].t)},
                           {"max", json_number(get(rows[imax], i))},
                           {"argmax_t", json_number(rows[imax].t)}};
  }
  return j;
}

double auto_or(const Config& cfg, const std::string& key) {
  return cfg.str(key) == "auto" ? std::numeric_limits<double>::quiet_NaN() : cfg.real(key);
}

ShapeKind parse_shape(const std::string& s) {
  if (s == "sphere") return ShapeKind::sphere;
  if (s == "ellipsoid") return ShapeKind::ellipsoid;
  if (s == "capped_tube") return ShapeKind::capped_tube;
  throw ConfigError("shape must be sphere, ellipsoid or capped_tube, got '" + s + "'");
}

double sphere_extinction(int n, double c, double r0) {
  const double k = std::sqrt(-c);
  return std::log(std::cosh(k * r0)) / (n * k * k);
}

double tube_extinction(int n, double c, double s0) {
  const double k = std::sqrt(-c);
  auto f = [&](double s) { return 1.0 / ((n - 1) * k / std::tanh(k * s) + k * std::tanh(k * s)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, s0, 15, 1e-14);
}

struct FlowResult {
  FlowTrace trace;
  json summary;
  std::vector<Check> checks;
};

FlowResult run_equivariant(const Config& cfg, EquivariantFamily family) {
  EquivariantConfig ec;
  ec.family = family;
  ec.n = static_cast<int>(cfg.integer("n"));
  ec.q = static_cast<int>(cfg.integer("q"));
  ec.c = cfg.real("c");
  ec.radius0 = family == EquivariantFamily::sphere ? cfg.real("rho0") : cfg.real("s0");
  ec.dt = cfg.str("dt") == "auto" ? 0.0 : cfg.real("dt");
  const double eps = auto_or(cfg, "eps");
  ec.eps = std::isnan(eps) ? 0.0 : eps;
  ec.sigma = cfg.real("sigma");
  ec.window_half_length = cfg.real("window");
  ec.max_steps = cfg.integer("max_steps");
  ec.record_every = static_cast<int>(cfg.integer("record_every"));
  ec.assert_invariants = cfg.flag("assert_pinched");
  if (ec.n < 2) throw ConfigError("n must be >= 2");
  if (ec.q < 1) throw ConfigError("q must be >= 1");
  if (!(ec.c < 0.0)) throw ConfigError("c must be negative");
  if (!(ec.radius0 > 0.0)) throw ConfigError("initial radius must be positive");
  if (ec.record_every < 1) throw ConfigError("record_every must be >= 1");

  auto run = run_flow(ec);
  FlowResult res;
  const auto& s = run.summary;
  res.summary = {{"engine", family == EquivariantFamily::sphere ? "sphere" : "tube"},
                 {"status", std::string(to_string(run.trace.status()))},
                 {"extinction_time", json_number(run.trace.extinction_time())},
                 {"steps", s.steps},
                 {"boundary_residual_max", json_number(s.boundary_residual_max)},
                 {"lambda_mu_residual_max", json_number(s.lambda_mu_residual_max)},
                 {"ho_ratio_final", json_number(s.ho_ratio_final)},
                 {"delta0", json_number(s.delta0)},
                 {"delta_min", json_number(s.delta_min)}};
  const double T = run.trace.extinction_time();
  if (family == EquivariantFamily::sphere) {
    const double Tref = sphere_extinction(ec.n, ec.c, ec.radius0);
    res.summary["extinction_time_closed_form"] = Tref;
    res.checks.push_back({"status_round_point", 0.0, "terminal status round_point",
                          run.trace.status() == FlowStatus::round_point});
    res.checks.push_back({"extinction_vs_closed_form", std::abs(T - Tref) / Tref, "relative error <= 1e-6",
                          std::abs(T - Tref) <= 1e-6 * Tref});
    double margin_min = std::numeric_limits<double>::infinity(), x0_excess = -std::numeric_limits<double>::infinity();
    for (const auto& r : run.trace.rows()) {
      margin_min = std::min(margin_min, r.pinch_margin_min);
      x0_excess = std::max(x0_excess, (r.x0_max - r.x0_bound) / r.x0_bound);
    }
    res.checks.push_back({"pinch_margin_positive", margin_min, "min pinch margin > 0", margin_min > 0.0});
    res.checks.push_back({"x0_bound", x0_excess, "max (x0 - bound)/bound <= 1e-9", x0_excess <= 1e-9});
  } else {
    const double Tref = tube_extinction(ec.n, ec.c, ec.radius0);
    res.summary["extinction_time_quadrature"] = Tref;
    res.summary["window_half_length"] = ec.window_half_length;
    res.checks.push_back({"status_collapse_to_geodesic", 0.0, "terminal status collapse_to_geodesic",
                          run.trace.status() == FlowStatus::collapse_to_geodesic});
    res.checks.push_back({"extinction_vs_quadrature", std::abs(T - Tref), "absolute error <= 1e-6",
                          std::abs(T - Tref) <= 1e-6});
    res.checks.push_back({"boundary_identity", s.boundary_residual_max, "max relative residual < 1e-9",
                          s.boundary_residual_max < 1e-9});
    res.checks.push_back({"lambda_mu_identity", s.lambda_mu_residual_max, "max residual < 1e-12",
                          s.lambda_mu_residual_max < 1e-12});
  }
  res.trace = std::move(run.trace);
  return res;
}

FlowResult run_axisym_engine(const Config& cfg) {
  AxisymConfig ac;
  ac.n = static_cast<int>(cfg.integer("n"));
  ac.c = cfg.real("c");
  if (cfg.integer("q") != 1) throw ConfigError("the axisym engine is a hypersurface flow: q must be 1");
  ac.shape.kind = parse_shape(cfg.str("shape"));
  ac.shape.rho0 = cfg.real("rho0");
  ac.shape.a = cfg.real("a");
  ac.shape.b = cfg.real("b");
  ac.shape.s = cfg.real("s0");
  ac.shape.L = cfg.real("L");
  const auto nodes = cfg.integer("nodes");
  if (nodes < 9 || nodes > 1'000'000) throw ConfigError("nodes must lie in [9, 1000000]");
  ac.nodes = static_cast<int>(nodes);
  ac.cfl = cfg.str("cfl") == "auto" ? 0.0 : cfg.real("cfl");
  ac.monitor.sigma = cfg.real("sigma");
  ac.monitor.eta = cfg.real("eta");
  ac.monitor.diam_tol = cfg.real("diam_tol");
  ac.monitor.ratio_tol = cfg.real("ratio_tol");
  ac.monitor.ho_ratio_tol = cfg.real("ho_ratio_tol");
  ac.monitor.H_max_stop = auto_or(cfg, "H_max_stop");
  ac.monitor.eps = auto_or(cfg, "eps");
  ac.max_steps = cfg.integer("max_steps");
  ac.monitor_every = static_cast<int>(cfg.integer("monitor_every"));
  ac.record_every = static_cast<int>(cfg.integer("record_every"));
  ac.require_pinched = cfg.flag("require_pinched");
  ac.assert_pinched = cfg.flag("assert_pinched");
  if (ac.n < 2) throw ConfigError("n must be >= 2");
  if (!(ac.c < 0.0)) throw ConfigError("c must be negative");

  auto run = run_axisym(ac);
  const auto& s = run.summary;
  FlowResult res;
  res.summary = {{"engine", "axisym"},
                 {"status", std::string(to_string(run.trace.status()))},
                 {"extinction_time", json_number(run.trace.extinction_time())},
                 {"steps", s.steps},
                 {"remeshes", s.remeshes},
                 {"eps", json_number(s.eps)},
                 {"eps_star0", json_number(s.eps_star0)},
                 {"H_max0", json_number(s.H_max0)},
                 {"diam0", json_number(s.diam0)},
                 {"margin0", json_number(s.margin0)},
                 {"margin_min_window", json_number(s.margin_min_window)},
                 {"margin_min", json_number(s.margin_min)},
                 {"thm41_ratio0", json_number(s.thm41_ratio0)},
                 {"thm41_ratio_max", json_number(s.thm41_ratio_max)},
                 {"x0_rel_excess_max", json_number(s.x0_rel_excess_max)},
                 {"lemma21_min", json_number(s.lemma21_min)},
                 {"lemma31_excess_max", json_number(s.lemma31_excess_max)},
                 {"constraint_residual_max", json_number(s.constraint_residual_max)},
                 {"reached_small_diam", s.reached_small_diam},
                 {"t_small_diam", json_number(s.t_small_diam)},
                 {"H_ratio_small_diam", json_number(s.H_ratio_small_diam)},
                 {"ho_ratio_small_diam", json_number(s.ho_ratio_small_diam)},
                 {"diam_definition", "max(pole-to-pole profile length, pi * max rho)"}};
  res.checks.push_back({"constraint_residual", s.constraint_residual_max, "max |c<X,X> - 1| < 1e-10",
                        s.constraint_residual_max < 1e-10});
  res.checks.push_back({"x0_bound", s.x0_rel_excess_max, "max (x0 - bound)/bound <= 1e-3",
                        s.x0_rel_excess_max <= 1e-3});
  res.checks.push_back({"lemma21_discrete", s.lemma21_min, "min margin/scale >= -1e-2", s.lemma21_min >= -1e-2});
  if (s.eps_star0 > 0.0) {
    res.checks.push_back({"pinch_margin_positive_window", s.margin_min_window,
                          "pinch margin > 0 while H_max < 10 H_max(0)", s.margin_positive_window});
    res.checks.push_back({"pinch_margin_half_initial", s.margin_min_window / s.margin0,
                          "window minimum >= 0.5 initial margin", s.margin_min_window >= 0.5 * s.margin0});
    res.checks.push_back({"thm41_ratio", s.thm41_ratio_max / s.thm41_ratio0, "running max <= 10 initial value",
                          s.thm41_ratio_max <= 10.0 * s.thm41_ratio0});
    if (run.trace.status() == FlowStatus::round_point || s.reached_small_diam) {
      res.checks.push_back({"round_point_H_ratio", s.H_ratio_small_diam, "H_min/H_max > ratio_tol at small diam",
                            s.reached_small_diam && s.H_ratio_small_diam > ac.monitor.ratio_tol});
      res.checks.push_back({"round_point_ho_ratio", s.ho_ratio_small_diam,
                            "max |ho|^2/|H|^2 < ho_ratio_tol at small diam",
                            s.reached_small_diam && s.ho_ratio_small_diam < ac.monitor.ho_ratio_tol});
    }
  }
  if (ac.shape.kind == ShapeKind::sphere && run.trace.status() == FlowStatus::round_point) {
    const double Tref = sphere_extinction(ac.n, ac.c, ac.shape.rho0);
    const double rel = std::abs(run.trace.extinction_time() - Tref) / Tref;
    res.summary["extinction_time_closed_form"] = Tref;
    res.checks.push_back({"extinction_vs_closed_form", rel, "relative error <= 0.02", rel <= 0.02});
  }
  res.trace = std::move(run.trace);
  return res;
}

}  // namespace

std::vector<KeySpec> flow_schema() {
  return {
      {"engine", "sphere", "sphere | tube (exact ODE engines) | axisym (finite differences)"},
      {"n", "6", "hypersurface dimension"},
      {"q", "1", "codimension (sphere/tube engines; axisym requires 1)"},
      {"c", "-1", "ambient curvature (< 0)"},
      {"rho0", "1", "initial geodesic radius of spheres"},
      {"s0", "atanh(0.5)", "initial tube radius (tube engine and capped_tube shape)"},
      {"window", "1", "tube engine: half-length of the axial window used for diam and x0"},
      {"dt", "auto", "ODE step; auto = 1e-3 r0/|H(0)|"},
      {"eps", "auto", "pinch-margin weight; auto = 0 (ODE engines) or 0.9 eps_star(M0) (axisym)"},
      {"sigma", "0.1", "exponent of f_sigma and of the |ho|^2/|H|^(2(1-sigma)) monitor"},
      {"eta", "0.1", "axisym gradient monitor parameter, in (0, 1/n)"},
      {"shape", "ellipsoid", "axisym initial shape: sphere | ellipsoid | capped_tube"},
      {"a", "1", "ellipsoid polar geodesic radius"},
      {"b", "1.1", "ellipsoid equatorial geodesic radius"},
      {"L", "3", "capped tube axial half-length"},
      {"nodes", "400", "axisym profile nodes"},
      {"cfl", "auto", "axisym dt / (min chord)^2; auto = 0.9/(2n)"},
      {"diam_tol", "0.01", "round point: diam < diam_tol diam(0)"},
      {"ratio_tol", "0.95", "round point: H_min/H_max > ratio_tol"},
      {"ho_ratio_tol", "1e-3", "round point: max |ho|^2/|H|^2 < ho_ratio_tol"},
      {"H_max_stop", "auto", "axisym stop when H_max exceeds this; auto = 1e3 sqrt(-c)"},
      {"max_steps", "50000000", "step limit"},
      {"record_every", "1", "write every k-th monitored step to the trace"},
      {"monitor_every", "1", "axisym: evaluate monitors every k-th step"},
      {"assert_pinched", "0", "exit 2 as soon as the run leaves the pinched set (ODE engines: all invariants)"},
      {"require_pinched", "0", "axisym: reject an initial profile that is not strictly pinched"},
  };
}

std::vector<KeySpec> sample_tensors_schema() {
  return {
      {"n", "6", "dimension (>= 6)"},
      {"q", "1", "codimension"},
      {"c", "-1", "ambient curvature (< 0)"},
      {"eps", "0.005", "pinching margin weight"},
      {"count", "10", "number of records"},
      {"seed", "42", "base seed; record i uses the seed derived from (seed, i)"},
  };
}

int cmd_lemmas(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, "lemmas", [&] {
    const std::string start = utc_now();
    const Config cfg = load(lemmas_schema(), opt);
    const LemmasConfig lc = lemmas_config(cfg, opt.threads);
    const auto report = run_lemmas(lc, [&](const std::string& what) { log << "  done: " << what << "\n"; });
    const json rj = report.to_json(lc);
    atomic_write(opt.out / "lemmas_report.json", dump_json(rj));
    json m = manifest_head("lemmas", cfg, start);
    m["summary"] = rj["summary"];
    json items = json::array();
    for (const auto& c : report.checks) {
      if (c.status != CheckStatus::pass) items.push_back({{"suite", c.suite}, {"name", c.name}, {"params", c.params},
                                                          {"status", to_string(c.status)}});
    }
    m["non_pass_items"] = items;
    m["outputs"] = {{"report", "lemmas_report.json"}};
    finish_manifest(m, opt.out);
    for (const auto& c : report.checks) {
      if (c.status == CheckStatus::fail || c.status == CheckStatus::unexpected_pass) {
        log << "  FAILED " << c.suite << "/" << c.name << " " << c.params.dump() << " worst=" << format_double(c.worst)
            << "\n";
      }
    }
    log << "lemmas: " << rj["summary"].dump() << "\n";
    return report.ok() ? kExitOk : kExitViolation;
  });
}

int cmd_flow(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, "flow", [&] {
    const std::string start = utc_now();
    const Config cfg = load(flow_schema(), opt);
    const std::string engine = cfg.str("engine");
    FlowResult res;
    if (engine == "sphere") res = run_equivariant(cfg, EquivariantFamily::sphere);
    else if (engine == "tube") res = run_equivariant(cfg, EquivariantFamily::tube);
    else if (engine == "axisym") res = run_axisym_engine(cfg);
    else throw ConfigError("engine must be sphere, tube or axisym, got '" + engine + "'");

    atomic_write(opt.out / "trace.csv", trace_csv(res.trace));
    json m = manifest_head("flow", cfg, start);
    m["summary"] = res.summary;
    m["extrema"] = column_extrema(res.trace.rows());
    m["checks"] = checks_json(res.checks);
    bool ok = true;
    for (const auto& c : res.checks) ok = ok && c.pass;
    m["ok"] = ok;
    json outputs = {{"trace", "trace.csv"}, {"rows", res.trace.rows().size()}};
    if (opt.plot) {
      write_trace_plots(opt.out / "plots", res.trace.rows());
      outputs["plots"] = "plots/";
    }
    m["outputs"] = outputs;
    finish_manifest(m, opt.out);
    log << "flow " << engine << ": status " << res.summary["status"].get<std::string>() << ", T = "
        << format_double(res.trace.extinction_time()) << ", rows " << res.trace.rows().size() << "\n";
    for (const auto& c : res.checks) {
      log << "  " << (c.pass ? "ok     " : "FAILED ") << c.name << " = " << format_double(c.value) << " ("
          << c.criterion << ")\n";
    }
    return ok ? kExitOk : kExitViolation;
  });
}

int cmd_sample_tensors(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, "sample-tensors", [&] {
    const std::string start = utc_now();
    const Config cfg = load(sample_tensors_schema(), opt);
    const int n = static_cast<int>(cfg.integer("n"));
    const int q = static_cast<int>(cfg.integer("q"));
    const double c = cfg.real("c");
    const double eps = cfg.real("eps");
    const auto count = cfg.integer("count");
    const auto seed = cfg.integer("seed");
    if (n < 6) throw ConfigError("n must be >= 6");
    if (q < 1) throw ConfigError("q must be >= 1");
    if (!(c < 0.0)) throw ConfigError("c must be negative");
    if (!(eps >= 0.0)) throw ConfigError("eps must be >= 0");
    if (count < 0) throw ConfigError("count must be >= 0");
    if (seed < 0) throw ConfigError("seed must be >= 0");

    const PinchingProfile prof(n, c);
    std::string out;
    double margin_min = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < count; ++i) {
      const auto h = random_pinched_sampler(n, q, c, eps,
                                            shard_seed(static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(i)));
      const auto r = pinch_report(prof, h, eps);
      if (!(r.eps_margin > 0.0)) {
        throw InvariantViolation("sampled tensor " + std::to_string(i) + " is not strictly pinched");
      }
      margin_min = std::min(margin_min, r.eps_margin);
      json blocks = json::array();
      for (const auto& b : h.blocks()) {
        json rows = json::array();
        for (int a = 0; a < n; ++a) {
          json row = json::array();
          for (int k = 0; k < n; ++k) row.push_back(b(a, k));
          rows.push_back(row);
        }
        blocks.push_back(rows);
      }
      json rec = {{"index", i},
                  {"n", n},
                  {"q", q},
                  {"c", c},
                  {"eps", eps},
                  {"h", blocks},
                  {"report",
                   {{"h_sq", r.h_sq},
                    {"H_sq", r.H_sq},
                    {"ho_sq", r.ho_sq},
                    {"P1", json_number(r.P1)},
                    {"P2", json_number(r.P2)},
                    {"Q1", json_number(r.Q1)},
                    {"Q2", json_number(r.Q2)},
                    {"R1", r.R1},
                    {"R2", r.R2},
                    {"W", r.W},
                    {"ricci_min", r.ricci_min},
                    {"alpha", json_number(r.alpha)},
                    {"alpha_ring", json_number(r.alpha_ring)},
                    {"omega", json_number(r.omega)},
                    {"pinch_margin", json_number(r.eps_margin)}}}};
      out += rec.dump() + "\n";
    }
    atomic_write(opt.out / "tensors.ndjson", out);
    json m = manifest_head("sample-tensors", cfg, start);
    m["summary"] = {{"records", count}, {"pinch_margin_min", json_number(margin_min)}};
    m["outputs"] = {{"tensors", "tensors.ndjson"}};
    finish_manifest(m, opt.out);
    log << "sample-tensors: wrote " << count << " records\n";
    return kExitOk;
  });
}

int cmd_report(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, "report", [&] {
    const fs::path mpath = opt.out / "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw ConfigError("no manifest.json in '" + opt.out.string() + "'");
    json m;
    try {
      m = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse '" + mpath.string() + "': " + e.what());
    }
    const std::string command = m.value("command", "?");
    log << "run directory: " << opt.out.string() << "\n";
    log << "command: " << command << " (hypermcf " << m.value("version", "?") << ")\n";
    if (m.contains("wall_time")) {
      log << "wall time: " << m["wall_time"].value("start", "?") << " .. "
          << (m["wall_time"]["end"].is_string() ? m["wall_time"]["end"].get<std::string>() : "?") << "\n";
    }
    if (m.contains("config")) {
      log << "config:";
      for (auto it = m["config"].begin(); it != m["config"].end(); ++it) log << " " << it.key() << "=" << it.value().get<std::string>();
      log << "\n";
    }
    if (m.contains("summary")) log << "summary: " << m["summary"].dump() << "\n";
    bool ok = true;
    if (m.contains("checks")) {
      for (const auto& c : m["checks"]) {
        const bool pass = c.value("pass", false);
        ok = ok && pass;
        log << "  " << (pass ? "ok     " : "FAILED ") << c.value("name", "?") << " (" << c.value("criterion", "") << ")\n";
      }
    }
    if (m.contains("ok")) ok = ok && m["ok"].get<bool>();
    if (command == "lemmas") ok = ok && m["summary"].value("ok", false);
    const fs::path tpath = opt.out / "trace.csv";
    if (fs::exists(tpath)) {
      const auto rows = read_trace_csv(tpath);
      log << "trace: " << rows.size() << " rows";
      if (!rows.empty()) {
        const auto& r = rows.back();
        log << ", last t = " << format_double(r.t) << ", H_max = " << format_double(r.H_max)
            << ", pinch_margin_min = " << format_double(r.pinch_margin_min);
      }
      log << "\n";
      if (opt.plot) {
        write_trace_plots(opt.out / "plots", rows);
        log << "plots written to " << (opt.out / "plots").string() << "\n";
      }
    } else if (opt.plot) {
      throw ConfigError("--plot needs a trace.csv in the run directory");
    }
    return ok ? kExitOk : kExitViolation;
  });
}

json strip_wall_time(json manifest) {
  manifest.erase("wall_time");
  return manifest;
}

}  // namespace hypermcf::harness
