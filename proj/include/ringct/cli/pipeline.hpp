#pragma once

#include "ringct/cli/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ringct::cli {

struct RunOptions {
  std::optional<std::filesystem::path> out; // overrides output.directory
  std::optional<std::uint64_t> seed;        // replaces the simulation seed list
  std::size_t jobs = 1;
  std::ostream* log = nullptr;              // progress lines; silent when null
};

struct Failure {
  std::string job;
  std::string message;
  bool degenerate = false;
  std::vector<std::size_t> detectors;
};

struct RunReport {
  std::vector<Failure> failures;

  /// 0 on success, 3 when every failure is a degenerate model, 1 otherwise.
  int exit_code() const;
};

/// Resolved output directory for a config and options.
std::filesystem::path output_dir(const ExperimentConfig& cfg, const RunOptions& opts);

RunReport cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts);
RunReport cmd_reconstruct(const ExperimentConfig& cfg, const RunOptions& opts);
RunReport cmd_analyze(const ExperimentConfig& cfg, const RunOptions& opts);
RunReport cmd_profile(const ExperimentConfig& cfg, const RunOptions& opts);
/// simulate, reconstruct, analyze and profile, skipping stages the config
/// has no section for.
RunReport cmd_all(const ExperimentConfig& cfg, const RunOptions& opts);

/// Dataset directory name for one (intensity, seed) pair.
std::string dataset_name(double intensity, std::uint64_t seed);

} // namespace ringct::cli
