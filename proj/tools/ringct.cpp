#include "ringct/cli/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run(const std::string& command, const std::string& config_path,
        const ringct::cli::RunOptions& opts) {
  using namespace ringct::cli;
  const ExperimentConfig cfg = load_config(config_path);
  RunReport report;
  if (command == "simulate")
    report = cmd_simulate(cfg, opts);
  else if (command == "reconstruct")
    report = cmd_reconstruct(cfg, opts);
  else if (command == "analyze")
    report = cmd_analyze(cfg, opts);
  else if (command == "profile")
    report = cmd_profile(cfg, opts);
  else
    report = cmd_all(cfg, opts);
  for (const Failure& f : report.failures)
    std::cerr << (f.degenerate ? "degenerate: " : "error: ") << f.job << ": " << f.message << '\n';
  return report.exit_code();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat-field aware CT reconstruction experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool quiet = false;

  for (const char* name : {"simulate", "reconstruct", "analyze", "profile", "all"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment configuration (YAML)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--seed", seed, "replace the configured seed list by this seed");
    sub->add_option("--jobs", jobs, "worker threads for independent jobs")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", quiet, "suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  ringct::cli::RunOptions opts;
  if (!out_dir.empty()) opts.out = out_dir;
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) opts.seed = seed;
  opts.jobs = jobs;
  opts.log = quiet ? nullptr : &std::cerr;

  try {
    return run(app.get_subcommands().front()->get_name(), config_path, opts);
  } catch (const ringct::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
