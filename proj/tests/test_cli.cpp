#include "doctest.h"

#include "ringct/cli/config.hpp"
#include "ringct/cli/pipeline.hpp"
#include "ringct/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace ringct;
using namespace ringct::cli;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("ringct_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

const char* kTiny = R"(name: tiny
geometry:
  detectors: 24
  projections: 30
  detector_width: 2.0
  domain_side: 2.0
  grid_n: 16
  angle_span: half
phantom:
  kind: grains
  seed: 3
  num_grains: 10
  high: 1.0
simulation:
  flatfield: poisson
  intensity: [200, 1000]
  flat_samples: 3
  seeds: [1, 2]
models:
  - {name: amap, kind: amap}
  - {name: jmap, kind: jmap, strategy: fe, beta: 10, warm_start_iters: 5}
  - {name: swls, kind: swls, strategy: fe, beta: 10, seeds: [1]}
solver:
  max_iters: 20
  step_factor: 1.0
  record_every: 5
  track_metrics: true
analysis:
  ring_magnitude: true
  stripe_images: true
  bias_maps: true
profile:
  epsilon: 0.05
  t0: [0.5, 1.0]
  rho_max: 1.5
  samples: 31
  envelope_t0: [0.3, 0.6]
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("parse the tiny config") {
  const ExperimentConfig c = parse_config(kTiny);
  CHECK(c.name == "tiny");
  REQUIRE(c.geometry);
  CHECK(c.geometry->detectors == 24);
  CHECK(c.geometry->forward_grid_n == 0);
  CHECK(c.geometry->build().forward_grid_n >= 32);
  CHECK(c.simulation->intensities == std::vector<double>{200.0, 1000.0});
  REQUIRE(c.models.size() == 3);
  CHECK(c.models[1].spec.kind == ObjectiveKind::jmap);
  CHECK(c.models[1].spec.strategy.kind == FlatPriorKind::flatfield_emphasizing);
  CHECK(c.models[1].spec.strategy.beta == 10.0);
  CHECK(c.models[1].warm_start_iters == 5);
  CHECK(c.models[2].seeds == std::vector<std::uint64_t>{1});
  CHECK(c.solver.track_metrics);
  CHECK(c.profile->t0 == std::vector<double>{0.5, 1.0});
  CHECK(c.source_text == kTiny);
}

TEST_CASE("config errors name the field and line") {
  const std::string tiny = kTiny;
  std::string msg = config_error(replace(tiny, "  seed: 3\n", "  seed: 3\n  colour: red\n"));
  CHECK(msg.find("line 12") != std::string::npos);
  CHECK(msg.find("phantom.colour") != std::string::npos);
  CHECK(msg.find("unknown field") != std::string::npos);

  msg = config_error(replace(tiny, "kind: amap}", "kind: art}"));
  CHECK(msg.find("unknown model kind 'art'") != std::string::npos);
  CHECK(msg.find("line 20") != std::string::npos);

  CHECK(config_error(replace(tiny, "step_factor: 1.0", "step_factor: 2.0")).find("(0, 2)") != std::string::npos);
  CHECK(config_error(replace(tiny, "name: swls,", "name: amap,")).find("name") != std::string::npos);
  CHECK(config_error(replace(tiny, "angle_span: half", "angle_span: quarter")).find("'half' or 'full'") !=
        std::string::npos);
  CHECK(config_error(replace(tiny, "strategy: fe, beta: 10,", "strategy: fe, beta: -1,")).find("nonnegative") !=
        std::string::npos);
  CHECK(config_error(replace(tiny, "detectors: 24", "detectors: many")).find("cannot convert") != std::string::npos);
  CHECK(config_error(replace(tiny, "grid_n: 16", "grid_n: 16\n  forward_grid_n: 16")).find("finer") !=
        std::string::npos);
  CHECK(config_error(replace(tiny, "kind: grains", "kind: three_squares")).find("1 cm") != std::string::npos);
  CHECK(config_error("name: x\nmodels:\n  - {name: a, kind: amap}\n").find("simulation") != std::string::npos);
  CHECK(config_error("name: x\nsimulation: {intensity: 10, flat_samples: 1, seeds: [1]}\n").find("geometry") != std::string::npos);
  CHECK(config_error("name: [unclosed\n").find("line") != std::string::npos);
  CHECK(config_error("").find("empty") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/ringct.yaml"), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(RunReport{}.exit_code() == 0);
  CHECK(RunReport{{{"a", "m", true, {1}}}}.exit_code() == 3);
  CHECK(RunReport{{{"a", "m", true, {1}}, {"b", "m", false, {}}}}.exit_code() == 1);
  CHECK(dataset_name(500.0, 3) == "i500_s3");
  CHECK(dataset_name(0.5, 1) == "i0p5_s1");
}

TEST_CASE("end to end pipeline") {
  TempDir dir("e2e");
  const ExperimentConfig cfg = parse_config(kTiny);
  RunOptions opts;
  opts.out = dir.path / "a";

  CHECK_THROWS(cmd_reconstruct(cfg, opts));
  const RunReport report = cmd_all(cfg, opts);
  CHECK(report.failures.empty());
  CHECK(report.exit_code() == 0);

  const fs::path out = *opts.out;
  for (const char* rel :
       {"manifest.json", "simulate/phantom.csv", "simulate/phantom.pgm", "simulate/line_integrals_fine.bin",
        "simulate/i200_s1/counts.bin", "simulate/i1000_s2/flats.csv", "simulate/i1000_s2/v_true.csv",
        "reconstruct/i200_s1/amap/image.csv", "reconstruct/i200_s1/jmap/flatfield.csv",
        "reconstruct/i200_s1/swls/history.csv", "reconstruct/failures.csv", "analysis/table.csv",
        "analysis/summary.csv", "analysis/ring_magnitude.csv", "analysis/theta.csv", "profile/profile.csv",
        "profile/extrema.csv", "profile/envelope.csv"})
    CHECK_MESSAGE(fs::exists(out / rel), rel);
  // swls is restricted to seed 1
  CHECK_FALSE(fs::exists(out / "reconstruct/i200_s2/swls"));
  CHECK(fs::exists(out / "reconstruct/i200_s2/jmap/image.csv"));

  const std::string history = slurp(out / "reconstruct/i200_s1/jmap/history.csv");
  CHECK(history.rfind("iter,objective,rae,rfe,rr\n", 0) == 0);

  const json m = json::parse(slurp(out / "manifest.json"));
  CHECK(m["stages"] == json({"simulate", "reconstruct", "analyze", "profile"}));
  CHECK(m["config"] == kTiny);
  CHECK(m["experiment_key"] == io::sha256_string(kTiny));
  std::size_t checked = 0;
  for (const auto& f : m["files"]) {
    CHECK(io::sha256_file(out / f["path"].get<std::string>()) == f["sha256"]);
    ++checked;
  }
  CHECK(checked > 20);

  SUBCASE("a second run is byte identical") {
    RunOptions again = opts;
    again.out = dir.path / "b";
    again.jobs = 2;
    cmd_all(cfg, again);
    for (const auto& f : m["files"]) {
      const std::string rel = f["path"];
      CHECK_MESSAGE(slurp(out / rel) == slurp(*again.out / rel), rel);
    }
  }

  SUBCASE("a different config cannot reuse the directory") {
    const ExperimentConfig other = parse_config(replace(kTiny, "max_iters: 20", "max_iters: 21"));
    CHECK_THROWS_WITH(cmd_reconstruct(other, opts), doctest::Contains("different configuration"));
  }

  SUBCASE("seed override") {
    RunOptions one = opts;
    one.out = dir.path / "c";
    one.seed = 9;
    cmd_simulate(cfg, one);
    CHECK(fs::exists(*one.out / "simulate/i200_s9/counts.bin"));
    CHECK_FALSE(fs::exists(*one.out / "simulate/i200_s1"));
  }
}

TEST_CASE("degenerate models are reported, other jobs continue") {
  TempDir dir("degenerate");
  // so few photons that whole detectors see nothing at all
  std::string text = replace(kTiny, "intensity: [200, 1000]", "intensity: 0.01");
  text = replace(text, "flatfield: poisson", "flatfield: exact");
  text = replace(text, "{name: amap, kind: amap}", "{name: jeff, kind: jmap, strategy: jeffreys}");
  text = replace(text, "analysis:\n  ring_magnitude: true\n  stripe_images: true\n  bias_maps: true\n",
                 "");
  const ExperimentConfig cfg = parse_config(text);
  RunOptions opts;
  opts.out = dir.path;
  cmd_simulate(cfg, opts);
  const RunReport r = cmd_reconstruct(cfg, opts);
  REQUIRE_FALSE(r.failures.empty());
  CHECK(r.exit_code() == 3);
  bool jeffreys_failed = false;
  for (const Failure& f : r.failures) {
    CHECK(f.degenerate);
    CHECK_FALSE(f.detectors.empty());
    if (f.job.find("/jeff") != std::string::npos) jeffreys_failed = true;
  }
  CHECK(jeffreys_failed);
  const std::string failures = slurp(dir.path / "reconstruct/failures.csv");
  CHECK(failures.find("degenerate") != std::string::npos);
  const json m = json::parse(slurp(dir.path / "manifest.json"));
  CHECK_FALSE(m["failures"]["reconstruct"].empty());
}

TEST_CASE("profile stage flags t0 = 0") {
  TempDir dir("profile");
  const ExperimentConfig cfg =
      parse_config("name: p\nprofile:\n  epsilon: 0.05\n  t0: [0.0, 0.5]\n  envelope_t0: [0.0, 0.5]\n");
  RunOptions opts;
  opts.out = dir.path;
  const RunReport r = cmd_all(cfg, opts);
  CHECK(r.failures.size() == 2);
  CHECK(r.exit_code() == 3);
  CHECK(fs::exists(dir.path / "profile/profile.csv"));
  const std::string ext = slurp(dir.path / "profile/extrema.csv");
  CHECK(ext.find("\n0.5,") != std::string::npos);
}
