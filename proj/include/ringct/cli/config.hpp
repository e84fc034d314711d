#pragma once

#include "ringct/geometry.hpp"
#include "ringct/models.hpp"
#include "ringct/phantoms.hpp"
#include "ringct/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ringct::cli {

/// Invalid or unreadable experiment configuration. The message names the
/// offending field and, when known, its line in the file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GeometryConfig {
  std::size_t detectors = 0;
  std::size_t projections = 0;
  double detector_width = 0.0;
  double domain_side = 0.0;
  std::size_t grid_n = 0;
  std::size_t forward_grid_n = 0;
  AngleSpan span = AngleSpan::half;

  Geometry build() const;
};

enum class PhantomKind { three_squares, grains, shepp_logan };

struct PhantomConfig {
  PhantomKind kind = PhantomKind::grains;
  GrainsSpec grains;
};

enum class FlatFieldMode { exact, poisson };

struct SimulationConfig {
  FlatFieldMode flatfield = FlatFieldMode::poisson;
  std::vector<double> intensities;
  std::size_t flat_samples = 1;
  std::vector<std::uint64_t> seeds;
};

struct ModelConfig {
  ModelSpec spec;
  std::optional<std::size_t> max_iters;
  std::optional<InitKind> init;
  std::size_t warm_start_iters = 0; // AMAP iterations run first
  std::vector<std::uint64_t> seeds; // restricts the datasets; empty means all
};

struct SolverBlock {
  std::size_t max_iters = 500;
  double step_factor = 1.8;
  InitKind init = InitKind::zeros;
  std::size_t record_every = 10;
  bool track_metrics = false; // RAE and RR at every recorded iteration
  double support_radius = 0.0; // cm; 0 means the inscribed disk of the domain
};

struct AnalysisConfig {
  double mask_radius = 0.8;
  double ssim_sigma = 0.2;
  double ssim_range = 0.0; // 0: max - min of the reference image
  double filter_epsilon = 0.0;
  bool ring_magnitude = false;
  bool stripe_images = false;
  bool bias_maps = false;
};

struct ProfileConfig {
  double epsilon = 0.05;
  std::vector<double> t0;
  double rho_max = 2.0;
  std::size_t samples = 401;
  std::vector<double> envelope_t0;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  double window_lo = 0.0;
  double window_hi = 1.2;
  bool pgm = true;
  bool csv = true;
};

struct ExperimentConfig {
  std::string name;
  std::optional<GeometryConfig> geometry;
  std::optional<PhantomConfig> phantom;
  std::optional<SimulationConfig> simulation;
  std::vector<ModelConfig> models;
  SolverBlock solver;
  AnalysisConfig analysis;
  std::optional<ProfileConfig> profile;
  OutputConfig output;
  std::string source_text; // the config file verbatim, echoed into the manifest
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::string to_string(PhantomKind kind);
std::string to_string(InitKind kind);
std::string to_string(FlatPriorKind kind);

} // namespace ringct::cli
