// hypermcf: certification suites and flow experiments.
//
//   hypermcf lemmas [key=value ...]
//   hypermcf flow [sphere|tube|axisym] [key=value ...]
//   hypermcf sample-tensors [key=value ...]
//   hypermcf report [DIR]
//
// Common flags: --config PATH, --seed N, --out DIR, --plot, --threads N.

#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hypermcf/errors.hpp"
#include "hypermcf/harness/commands.hpp"
#include "hypermcf/harness/suites.hpp"

namespace h = hypermcf::harness;

namespace {

struct Flags {
  std::string config;
  std::int64_t seed = -1;
  std::string out = "hypermcf_out";
  bool plot = false;
  int threads = 0;
  std::vector<std::string> args;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "flat key=value config file");
  sub->add_option("--seed", f.seed, "base seed (overrides the seed key)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", f.out, "output directory");
  sub->add_flag("--plot", f.plot, "write SVG plots of the trace");
  sub->add_option("--threads", f.threads, "worker threads (default: HYPERMCF_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
}

std::string keys_footer(const std::vector<h::KeySpec>& schema) {
  return "\nConfig keys (set in --config files or as key=value arguments):\n" + h::Config(schema).describe();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypermcf: pinching certification suites and mean curvature flow experiments in hyperbolic space"};
  app.require_subcommand(1);
  app.footer("\nExit codes: 0 success, 2 failed check or invariant, 3 configuration error.");

  Flags f;
  auto* lemmas = app.add_subcommand("lemmas", "run the certification suites and write lemmas_report.json");
  auto* flow = app.add_subcommand("flow", "run a flow and write trace.csv and manifest.json");
  auto* sample = app.add_subcommand("sample-tensors", "write pinched tensor samples as NDJSON");
  auto* report = app.add_subcommand("report", "summarise a run directory");
  for (auto* sub : {lemmas, flow, sample, report}) add_common(sub, f);
  lemmas->add_option("overrides", f.args, "key=value overrides");
  flow->add_option("overrides", f.args, "engine name and key=value overrides");
  sample->add_option("overrides", f.args, "key=value overrides");
  report->add_option("dir", f.args, "run directory (default: --out)");
  lemmas->footer(keys_footer(h::lemmas_schema()));
  flow->footer(keys_footer(h::flow_schema()));
  sample->footer(keys_footer(h::sample_tensors_schema()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return h::kExitConfig;
  }

  h::CommandOptions opt;
  if (!f.config.empty()) opt.config_path = f.config;
  if (f.seed >= 0) opt.seed = static_cast<std::uint64_t>(f.seed);
  opt.out = f.out;
  opt.plot = f.plot;
  try {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    opt.threads = f.threads > 0 ? f.threads : h::threads_from_env(static_cast<int>(hw));
  } catch (const hypermcf::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return h::kExitConfig;
  }

  if (report->parsed()) {
    if (f.args.size() > 1) {
      std::cerr << "report: expected at most one run directory\n";
      return h::kExitConfig;
    }
    if (!f.args.empty()) opt.out = f.args.front();
    return h::cmd_report(opt, std::cerr);
  }
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    const auto& a = f.args[i];
    if (a.find('=') != std::string::npos) {
      opt.overrides.push_back(a);
    } else if (flow->parsed() && i == 0) {
      opt.overrides.push_back("engine=" + a);
    } else {
      std::cerr << "expected key=value, got '" << a << "'\n";
      return h::kExitConfig;
    }
  }
  if (lemmas->parsed()) return h::cmd_lemmas(opt, std::cerr);
  if (flow->parsed()) return h::cmd_flow(opt, std::cerr);
  return h::cmd_sample_tensors(opt, std::cerr);
}
