#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "hypermcf/errors.hpp"
#include "hypermcf/harness/commands.hpp"
#include "hypermcf/harness/config.hpp"
#include "hypermcf/harness/io.hpp"
#include "hypermcf/harness/suites.hpp"

using namespace hypermcf;
using namespace hypermcf::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypermcf_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandOptions options(const fs::path& out, std::vector<std::string> overrides) {
  CommandOptions o;
  o.out = out;
  o.overrides = std::move(overrides);
  return o;
}

std::vector<std::string> small_lemmas() {
  return {"samples=300", "points_per_decade=16", "lemma32_n=5,6", "lemma32_c=-1", "beta_c=-1"};
}

}  // namespace

TEST_CASE("expression evaluator") {
  CHECK(evaluate_expression("atanh(0.5)") == doctest::Approx(0.5493061443340549).epsilon(1e-15));
  CHECK(evaluate_expression(" -4 ") == -4.0);
  CHECK(evaluate_expression("1e3*sqrt(4)") == 2000.0);
  CHECK(evaluate_expression("2^3^2") == 512.0);
  CHECK(evaluate_expression("-2^2") == -4.0);
  CHECK(evaluate_expression("(1+2)*3-4/8") == 8.5);
  CHECK(evaluate_expression("pi/2") == std::numbers::pi / 2);
  CHECK(evaluate_expression("log(e)") == 1.0);
  for (const char* bad : {"", "1+", "foo", "sqrt(2", "2 3", "sqrt(-1)", "bar(1)"}) {
    CHECK_THROWS_AS((void)evaluate_expression(bad), ConfigError);
  }
}

TEST_CASE("config parsing and validation") {
  Config cfg({{"n", "6", ""}, {"c", "-1", ""}, {"list", "1,2,3", ""}, {"flag", "0", ""}});
  CHECK(cfg.integer("n") == 6);
  CHECK(cfg.integers("list") == std::vector<int>{1, 2, 3});
  CHECK_FALSE(cfg.flag("flag"));
  cfg.set("n = 8");
  CHECK(cfg.integer("n") == 8);
  CHECK_THROWS_AS(cfg.set("m=1"), ConfigError);
  CHECK_THROWS_AS(cfg.set("no equals sign"), ConfigError);
  cfg.set("n=6.5");
  CHECK_THROWS_AS((void)cfg.integer("n"), ConfigError);
  cfg.set("flag=maybe");
  CHECK_THROWS_AS((void)cfg.flag("flag"), ConfigError);

  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment\n\nc = -4   # trailing comment\nlist = 5, 6\n";
  }
  cfg.load_file((dir / "run.cfg").string());
  CHECK(cfg.real("c") == -4.0);
  CHECK(cfg.integers("list") == std::vector<int>{5, 6});
  {
    std::ofstream f(dir / "bad.cfg");
    f << "unknown_key = 1\n";
  }
  CHECK_THROWS_AS(cfg.load_file((dir / "bad.cfg").string()), ConfigError);
  CHECK_THROWS_AS(cfg.load_file((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0722967}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(json_number(INFINITY).is_null());
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const fs::path dir = scratch("atomic");
  atomic_write(dir / "a.txt", "one");
  atomic_write(dir / "a.txt", "two");
  CHECK(slurp(dir / "a.txt") == "two");
  CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
}

TEST_CASE("trace CSV golden header and first row") {
  const fs::path out = scratch("golden");
  std::ostringstream log;
  REQUIRE(cmd_flow(options(out, {"engine=sphere", "dt=1e-3", "record_every=10"}), log) == kExitOk);
  const std::string csv = slurp(out / "trace.csv");
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,H_min,H_max,h_sq_max,ho_sq_max,pinch_margin_min,f_sigma_max,thm41_ratio_max,grad_ratio_max,"
                  "diam,x0_max,x0_bound");
  const std::string golden = slurp(fs::path(HYPERMCF_TEST_DATA_DIR) / "golden" / "sphere_trace_head.csv");
  CHECK(header + "\n" + first + "\n" == golden);

  // Independent closed forms for the first row: |H| = 6 coth 1, |h|^2 = |H|^2/6,
  // diam = pi sinh 1, x0 = cosh 1.
  const auto rows = read_trace_csv(out / "trace.csv");
  REQUIRE(rows.size() >= 2);
  const double H = 6.0 / std::tanh(1.0);
  CHECK(rows[0].t == 0.0);
  CHECK(rows[0].H_max == doctest::Approx(H).epsilon(1e-14));
  CHECK(rows[0].h_sq_max == doctest::Approx(H * H / 6).epsilon(1e-14));
  CHECK(rows[0].diam == doctest::Approx(std::numbers::pi * std::sinh(1.0)).epsilon(1e-14));
  CHECK(rows[0].x0_max == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
}

TEST_CASE("flow manifest and exit codes") {
  std::ostringstream log;
  const fs::path out = scratch("flow");
  REQUIRE(cmd_flow(options(out, {"engine=tube", "record_every=1000"}), log) == kExitOk);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["summary"]["status"] == "collapse_to_geodesic");
  CHECK(m["summary"]["boundary_residual_max"].get<double>() < 1e-9);
  CHECK(m["config"]["engine"] == "tube");
  CHECK(m["wall_time"]["start"].is_string());
  CHECK(m["ok"] == true);

  CHECK(cmd_flow(options(scratch("bad_key"), {"engine=sphere", "bogus=1"}), log) == kExitConfig);
  CHECK(cmd_flow(options(scratch("bad_engine"), {"engine=torus"}), log) == kExitConfig);
  CHECK(cmd_flow(options(scratch("bad_c"), {"engine=sphere", "c=1"}), log) == kExitConfig);
  CHECK(cmd_flow(options(scratch("bad_q"), {"engine=axisym", "q=2"}), log) == kExitConfig);
  // A capped tube starts on the pinching boundary, so asserting preservation must fail.
  CHECK(cmd_flow(options(scratch("violation"), {"engine=axisym", "shape=capped_tube", "nodes=60", "assert_pinched=1"}),
                 log) == kExitViolation);
  CHECK(cmd_flow(options(scratch("not_pinched"),
                         {"engine=axisym", "shape=capped_tube", "nodes=60", "require_pinched=1"}),
                 log) == kExitConfig);
}

TEST_CASE("flow traces are reproducible") {
  std::ostringstream log;
  const std::vector<std::string> args{"engine=axisym", "shape=ellipsoid", "nodes=40", "max_steps=400", "record_every=7"};
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  REQUIRE(cmd_flow(options(a, args), log) == kExitOk);
  REQUIRE(cmd_flow(options(b, args), log) == kExitOk);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
  const auto ma = strip_wall_time(nlohmann::json::parse(slurp(a / "manifest.json")));
  const auto mb = strip_wall_time(nlohmann::json::parse(slurp(b / "manifest.json")));
  CHECK(ma.dump() == mb.dump());
}

TEST_CASE("lemmas report: expected-fail item, determinism across thread counts") {
  std::ostringstream log;
  const fs::path a = scratch("lem_a"), b = scratch("lem_b");
  auto oa = options(a, small_lemmas());
  auto ob = options(b, small_lemmas());
  oa.threads = 1;
  ob.threads = 3;
  REQUIRE(cmd_lemmas(oa, log) == kExitOk);
  REQUIRE(cmd_lemmas(ob, log) == kExitOk);
  const std::string ra = slurp(a / "lemmas_report.json");
  CHECK(ra == slurp(b / "lemmas_report.json"));

  const auto j = nlohmann::json::parse(ra);
  bool witness = false;
  for (const auto& c : j["checks"]) {
    if (c["name"] == "violation_witness") {
      witness = true;
      CHECK(c["status"] == "expected-fail");
      CHECK(c["witness"]["n"] == 5);
      CHECK(c["witness"]["margin"].get<double>() < 0.0);
    } else {
      CHECK(c["status"] == "pass");
    }
  }
  CHECK(witness);
  CHECK(j["summary"]["ok"] == true);

  oa.seed = 7;
  REQUIRE(cmd_lemmas(oa, log) == kExitOk);
  CHECK(slurp(a / "lemmas_report.json") != ra);

  auto bad = options(scratch("lem_bad"), {"n=5"});
  CHECK(cmd_lemmas(bad, log) == kExitConfig);
  bad.overrides = {"nn=6"};
  CHECK(cmd_lemmas(bad, log) == kExitConfig);
}

TEST_CASE("sample-tensors output") {
  std::ostringstream log;
  const fs::path a = scratch("st_a"), b = scratch("st_b");
  REQUIRE(cmd_sample_tensors(options(a, {"count=3", "seed=1", "q=2"}), log) == kExitOk);
  REQUIRE(cmd_sample_tensors(options(b, {"count=3", "seed=1", "q=2"}), log) == kExitOk);
  const std::string text = slurp(a / "tensors.ndjson");
  CHECK(text == slurp(b / "tensors.ndjson"));
  std::istringstream in(text);
  std::string line;
  int records = 0;
  while (std::getline(in, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec["report"]["pinch_margin"].get<double>() > 0.0);
    CHECK(rec["h"].size() == 2);
    ++records;
  }
  CHECK(records == 3);
  CHECK(cmd_sample_tensors(options(scratch("st_eps"), {"count=1", "eps=0.5"}), log) == kExitViolation);
  CHECK(cmd_sample_tensors(options(scratch("st_n"), {"n=4"}), log) == kExitConfig);
}

TEST_CASE("report subcommand") {
  std::ostringstream log;
  const fs::path out = scratch("report");
  REQUIRE(cmd_flow(options(out, {"engine=sphere", "record_every=500"}), log) == kExitOk);
  auto o = options(out, {});
  o.plot = true;
  std::ostringstream text;
  CHECK(cmd_report(o, text) == kExitOk);
  CHECK(text.str().find("status") != std::string::npos);
  CHECK(fs::exists(out / "plots" / "H_max.svg"));
  CHECK(slurp(out / "plots" / "H_max.svg").find("<polyline") != std::string::npos);
  CHECK(cmd_report(options(scratch("nothing_here"), {}), log) == kExitConfig);
}

TEST_CASE("shards cover the range once, independent of thread count") {
  for (int threads : {1, 2, 5}) {
    std::vector<int> hits(10001, 0);
    for_each_shard(10001, 97, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
      for (auto i = b; i < e; ++i) ++hits[static_cast<std::size_t>(i)];
    });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  CHECK_THROWS_AS(for_each_shard(10, 3, 2, [](std::int64_t s, std::int64_t, std::int64_t) {
                    if (s == 2) throw SamplerError("boom");
                  }),
                  SamplerError);
}
