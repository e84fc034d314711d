#include "ringct/cli/pipeline.hpp"

#include "ringct/errors.hpp"
#include "ringct/fbp.hpp"
#include "ringct/io.hpp"
#include "ringct/metrics.hpp"
#include "ringct/models.hpp"
#include "ringct/simulate.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace ringct::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Logger {
public:
  explicit Logger(std::ostream* os) : os_(os) {}
  void line(const std::string& msg) {
    if (!os_) return;
    std::lock_guard<std::mutex> lock(m_);
    *os_ << msg << '\n' << std::flush;
  }

private:
  std::ostream* os_;
  std::mutex m_;
};

struct Dataset {
  double intensity;
  std::uint64_t seed;
  std::string name;
};

std::vector<std::uint64_t> effective_seeds(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.seed) return {*opts.seed};
  return cfg.simulation->seeds;
}

std::vector<Dataset> datasets(const ExperimentConfig& cfg, const RunOptions& opts) {
  std::vector<Dataset> out;
  for (double intensity : cfg.simulation->intensities)
    for (std::uint64_t seed : effective_seeds(cfg, opts))
      out.push_back({intensity, seed, dataset_name(intensity, seed)});
  return out;
}

bool model_wants(const ModelConfig& m, const Dataset& d, const RunOptions& opts) {
  if (m.seeds.empty() || opts.seed) return true;
  return std::find(m.seeds.begin(), m.seeds.end(), d.seed) != m.seeds.end();
}

Image truth_image(const PhantomConfig& ph, std::size_t n, double side) {
  switch (ph.kind) {
  case PhantomKind::three_squares: return three_squares(n);
  case PhantomKind::grains: return grains(ph.grains, n, side);
  case PhantomKind::shepp_logan: return rasterize(shepp_logan(), n, side);
  }
  throw InvalidArgument("unknown phantom kind");
}

template <class F> void run_pool(std::size_t count, std::size_t workers, F&& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      job(k);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

std::string experiment_key(const ExperimentConfig& cfg, const RunOptions& opts) {
  std::string key = cfg.source_text;
  if (opts.seed) key += "\nseed-override=" + std::to_string(*opts.seed);
  return io::sha256_string(key);
}

fs::path manifest_path(const fs::path& out) { return out / "manifest.json"; }

json read_manifest(const fs::path& out) {
  std::ifstream f(manifest_path(out));
  if (!f) return json::object();
  return json::parse(f);
}

void require_manifest(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& out,
                      const std::string& stage) {
  if (!fs::exists(manifest_path(out)))
    throw std::runtime_error("no manifest in " + out.string() + "; run 'simulate' first");
  const json m = read_manifest(out);
  if (m.value("experiment_key", "") != experiment_key(cfg, opts))
    throw std::runtime_error("manifest in " + out.string() +
                             " was produced by a different configuration");
  const auto stages = m.value("stages", std::vector<std::string>{});
  if (std::find(stages.begin(), stages.end(), stage) == stages.end())
    throw std::runtime_error("stage '" + stage + "' has not been run in " + out.string());
}

json failures_json(const std::vector<Failure>& failures) {
  json arr = json::array();
  for (const auto& f : failures)
    arr.push_back({{"job", f.job},
                   {"message", f.message},
                   {"degenerate", f.degenerate},
                   {"detectors", f.detectors}});
  return arr;
}

json parameters_json(const ExperimentConfig& cfg, const RunOptions& opts) {
  json p;
  p["name"] = cfg.name;
  if (cfg.geometry) {
    const auto& g = *cfg.geometry;
    p["geometry"] = {{"detectors", g.detectors},
                     {"projections", g.projections},
                     {"detector_width", g.detector_width},
                     {"domain_side", g.domain_side},
                     {"grid_n", g.grid_n},
                     {"forward_grid_n", g.build().forward_grid_n},
                     {"angle_span", g.span == AngleSpan::half ? "half" : "full"}};
  }
  if (cfg.phantom) {
    p["phantom"] = {{"kind", to_string(cfg.phantom->kind)},
                    {"seed", cfg.phantom->grains.seed},
                    {"num_grains", cfg.phantom->grains.num_grains},
                    {"low", cfg.phantom->grains.low},
                    {"high", cfg.phantom->grains.high},
                    {"mask_radius", cfg.phantom->grains.mask_radius}};
  }
  if (cfg.simulation) {
    p["simulation"] = {
        {"flatfield", cfg.simulation->flatfield == FlatFieldMode::exact ? "exact" : "poisson"},
        {"intensity", cfg.simulation->intensities},
        {"flat_samples", cfg.simulation->flat_samples},
        {"seeds", effective_seeds(cfg, opts)}};
  }
  json models = json::array();
  for (const auto& m : cfg.models)
    models.push_back({{"name", m.spec.name},
                      {"kind", to_string(m.spec.kind)},
                      {"strategy", to_string(m.spec.strategy.kind)},
                      {"beta", m.spec.strategy.beta},
                      {"gamma", m.spec.tv.gamma},
                      {"delta", m.spec.tv.delta},
                      {"lambda", m.spec.lambda},
                      {"pseudo_count", m.spec.pseudo_count},
                      {"max_iters", m.max_iters.value_or(cfg.solver.max_iters)},
                      {"init", to_string(m.init.value_or(cfg.solver.init))},
                      {"warm_start_iters", m.warm_start_iters}});
  p["models"] = models;
  p["solver"] = {{"max_iters", cfg.solver.max_iters},
                 {"step_factor", cfg.solver.step_factor},
                 {"init", to_string(cfg.solver.init)},
                 {"record_every", cfg.solver.record_every},
                 {"track_metrics", cfg.solver.track_metrics},
                 {"support_radius", cfg.solver.support_radius}};
  p["window"] = {{"lo", cfg.output.window_lo},
                 {"hi", cfg.output.window_hi},
                 {"mapping", "linear, clipped, 16-bit PGM, top row = largest y"}};
  return p;
}

/// Rewrites the manifest: parameters, completed stages, failures and a hash
/// of every file below out.
void update_manifest(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& out,
                     const std::string& stage, const std::vector<Failure>& failures,
                     const json& windows = json::object()) {
  json m = read_manifest(out);
  const std::string key = experiment_key(cfg, opts);
  if (m.value("experiment_key", "") != key) m = json::object();
  m["experiment_key"] = key;
  m["config"] = cfg.source_text;
  m["parameters"] = parameters_json(cfg, opts);
  static const std::vector<std::string> order{"simulate", "reconstruct", "analyze", "profile"};
  std::set<std::string> done;
  for (const auto& s : m.value("stages", std::vector<std::string>{})) done.insert(s);
  done.insert(stage);
  std::vector<std::string> stages;
  for (const auto& s : order)
    if (done.count(s)) stages.push_back(s);
  m["stages"] = stages;
  m["failures"][stage] = failures_json(failures);
  if (!m.contains("windows")) m["windows"] = json::object();
  for (auto it = windows.begin(); it != windows.end(); ++it) m["windows"][it.key()] = it.value();

  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(out)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), out).generic_string();
    if (rel == "manifest.json") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json listed = json::array();
  for (const auto& rel : files)
    listed.push_back({{"path", rel},
                      {"sha256", io::sha256_file(out / rel)},
                      {"bytes", fs::file_size(out / rel)}});
  m["files"] = listed;
  std::ofstream f(manifest_path(out));
  if (!f) throw std::runtime_error("cannot write manifest in " + out.string());
  f << m.dump(2) << '\n';
}

void write_image(const fs::path& stem, const Image& img, double lo, double hi,
                 const OutputConfig& out) {
  if (out.csv) io::write_image_csv(stem.string() + ".csv", img);
  if (out.pgm) io::write_image_pgm(stem.string() + ".pgm", img, lo, hi);
}

void write_vector(const fs::path& path, const std::string& name, const std::vector<double>& v) {
  std::vector<double> idx(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<double>(i);
  io::write_columns_csv(path, {"detector", name}, {idx, v});
}

Failure failure_from(const std::string& job, const std::exception& e) {
  Failure f{job, e.what(), false, {}};
  if (const auto* md = dynamic_cast<const ModelDegenerate*>(&e)) {
    f.degenerate = true;
    f.detectors = md->detectors();
  } else if (const auto* pv = dynamic_cast<const PositivityViolation*>(&e)) {
    f.degenerate = true;
    std::set<std::size_t> det;
    for (const auto& c : pv->cells()) det.insert(c.detector);
    f.detectors.assign(det.begin(), det.end());
  }
  return f;
}

void write_failures_csv(const fs::path& path, const std::vector<Failure>& failures) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : failures) {
    std::string det;
    for (std::size_t k = 0; k < f.detectors.size(); ++k) {
      if (k) det += ' ';
      det += std::to_string(f.detectors[k]);
    }
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    rows.push_back({f.job, f.degenerate ? "degenerate" : "error", det, msg});
  }
  io::write_table_csv(path, {"job", "kind", "detectors", "message"}, rows);
}

struct SimulatedData {
  Sinogram counts;
  Sinogram flats;
  std::vector<double> v_true;
};

SimulatedData load_dataset(const fs::path& dir) {
  SimulatedData d;
  d.counts = io::read_sinogram_bin(dir / "counts.bin");
  d.flats = io::read_sinogram_csv(dir / "flats.csv");
  d.v_true = io::read_vector_csv(dir / "v_true.csv", 1);
  return d;
}

double frobenius(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

std::string fmt(double x) { return io::format_double(x); }

std::string intensity_label(double intensity) {
  if (intensity == std::floor(intensity) && intensity < 1e15)
    return std::to_string(static_cast<long long>(intensity));
  std::string s = io::format_double(intensity);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

double mean_of(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double std_of(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

} // namespace

int RunReport::exit_code() const {
  if (failures.empty()) return 0;
  const bool all_degenerate =
      std::all_of(failures.begin(), failures.end(), [](const Failure& f) { return f.degenerate; });
  return all_degenerate ? 3 : 1;
}

std::string dataset_name(double intensity, std::uint64_t seed) {
  return "i" + intensity_label(intensity) + "_s" + std::to_string(seed);
}

fs::path output_dir(const ExperimentConfig& cfg, const RunOptions& opts) {
  return opts.out ? *opts.out : cfg.output.directory;
}

RunReport cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.simulation) throw ConfigError("field 'simulation': section is required for simulate");
  Logger log(opts.log);
  const fs::path out = output_dir(cfg, opts);
  const fs::path dir = out / "simulate";
  fs::create_directories(dir);

  const Geometry geom = cfg.geometry->build();
  const Image truth = truth_image(*cfg.phantom, geom.grid_n, geom.domain_side);
  const Image fine = truth_image(*cfg.phantom, geom.forward_grid_n, geom.domain_side);
  write_image(dir / "phantom", truth, cfg.output.window_lo, cfg.output.window_hi, cfg.output);
  log.line("simulate: projecting phantom on the " + std::to_string(geom.forward_grid_n) + "^2 grid");
  const Sinogram line = forward_project(geom.fine(), fine);
  io::write_sinogram_bin(dir / "line_integrals_fine.bin", line);

  const SimulationConfig& sim = *cfg.simulation;
  for (const Dataset& d : datasets(cfg, opts)) {
    const fs::path ddir = dir / d.name;
    fs::create_directories(ddir);
    const FlatFieldTruth v = sim.flatfield == FlatFieldMode::exact
                                 ? constant_flatfield(d.intensity, geom.detectors)
                                 : sample_flatfield_truth(d.intensity, geom.detectors, d.seed);
    const Sinogram flats = sample_flats(v, sim.flat_samples, d.seed);
    const Sinogram counts = sample_counts(v, line, d.seed);
    write_vector(ddir / "v_true.csv", "v", v.v);
    io::write_sinogram_csv(ddir / "flats.csv", flats);
    io::write_sinogram_bin(ddir / "counts.bin", counts);
    log.line("simulate: " + d.name);
  }
  RunReport report;
  update_manifest(cfg, opts, out, "simulate", report.failures);
  return report;
}

RunReport cmd_reconstruct(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.models.empty()) throw ConfigError("field 'models': no models to reconstruct");
  Logger log(opts.log);
  const fs::path out = output_dir(cfg, opts);
  require_manifest(cfg, opts, out, "simulate");
  const fs::path sim_dir = out / "simulate";
  const fs::path dir = out / "reconstruct";
  fs::create_directories(dir);

  const Geometry geom = cfg.geometry->build();
  auto projector = std::make_shared<const Projector>(geom);
  const Image truth = truth_image(*cfg.phantom, geom.grid_n, geom.domain_side);
  const double support_radius =
      cfg.solver.support_radius > 0.0 ? cfg.solver.support_radius : 0.5 * geom.domain_side;
  const std::vector<std::uint8_t> support = disk_mask(geom.grid_n, geom.pixel_size(), support_radius);
  const std::vector<std::uint8_t> metric_mask =
      disk_mask(geom.grid_n, geom.pixel_size(), cfg.analysis.mask_radius);
  const FilterConfig filter{cfg.analysis.filter_epsilon, 2};

  const bool needs_norm = std::any_of(cfg.models.begin(), cfg.models.end(), [](const ModelConfig& m) {
    return m.spec.kind == ObjectiveKind::amap || m.spec.kind == ObjectiveKind::baseline_map ||
           m.warm_start_iters > 0 || m.spec.strategy.kind == FlatPriorKind::type2;
  });
  const double norm_sq = needs_norm ? default_norm_squared(*projector) : 0.0;

  struct Job {
    const Dataset* data;
    const ModelConfig* model;
  };
  const std::vector<Dataset> sets = datasets(cfg, opts);
  std::vector<Job> jobs;
  for (const Dataset& d : sets)
    for (const ModelConfig& m : cfg.models)
      if (model_wants(m, d, opts)) jobs.push_back({&d, &m});

  std::vector<std::optional<Failure>> results(jobs.size());
  run_pool(jobs.size(), opts.jobs, [&](std::size_t k) {
    const Dataset& d = *jobs[k].data;
    const ModelConfig& mc = *jobs[k].model;
    const std::string job = d.name + "/" + mc.spec.name;
    try {
      SimulatedData sd = load_dataset(sim_dir / d.name);
      ScanContext ctx(projector, {std::move(sd.counts), std::move(sd.flats), std::move(sd.v_true)});
      if (needs_norm) ctx.set_norm_squared(norm_sq);

      SolverConfig sc;
      sc.max_iters = mc.max_iters.value_or(cfg.solver.max_iters);
      sc.step_factor = cfg.solver.step_factor;
      sc.init = mc.init.value_or(cfg.solver.init);
      sc.record_every = cfg.solver.record_every;

      std::vector<Stage> stages;
      if (mc.warm_start_iters > 0) {
        ModelSpec warm;
        warm.name = "warm";
        warm.kind = ObjectiveKind::amap;
        warm.tv = mc.spec.tv;
        SolverConfig wc = sc;
        wc.max_iters = mc.warm_start_iters;
        stages.push_back({build_problem(warm, ctx, support), wc});
      }
      stages.push_back({build_problem(mc.spec, ctx, support), sc});

      std::vector<double> initial(projector->image_size(), 0.0);
      if (sc.init == InitKind::fbp) initial = fbp_initial_image(ctx, support);

      std::vector<std::vector<double>> tracked; // iter, rae, rfe, rr
      IterateCallback cb;
      double rr_den = 0.0;
      if (cfg.solver.track_metrics) {
        rr_den = frobenius(stripe_image(geom, ctx.data().v_true, ctx.v_f(), filter).values);
        cb = [&](std::size_t it, std::span<const double> u, const FlatFieldEstimate* est) {
          const double e_u = rae(u, truth.values, metric_mask);
          double e_v = std::nan("");
          double rr = std::nan("");
          if (est) {
            e_v = rfe(est->v_hat, ctx.data().v_true);
            if (rr_den > 0.0)
              rr = frobenius(stripe_image(geom, ctx.data().v_true, est->v_hat, filter).values) / rr_den;
          }
          tracked.push_back({static_cast<double>(it), e_u, e_v, rr});
        };
      }
      const SolveResult res = warm_start_chain(stages, std::move(initial), cb);

      const fs::path mdir = dir / d.name / mc.spec.name;
      fs::create_directories(mdir);
      Image img = Image::zeros_like(geom);
      img.values = res.image;
      write_image(mdir / "image", img, cfg.output.window_lo, cfg.output.window_hi, cfg.output);
      if (!cfg.output.csv) io::write_image_csv(mdir / "image.csv", img);
      if (res.flatfield) {
        const FlatFieldEstimate& f = *res.flatfield;
        std::vector<double> idx(f.v_hat.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
        io::write_columns_csv(mdir / "flatfield.csv",
                              {"detector", "v_hat", "theta1", "theta2", "theta3", "v_y", "v_prior"},
                              {idx, f.v_hat, f.theta1, f.theta2, f.theta3, f.v_y, f.v_prior});
      }
      std::vector<double> iters, objs, raes, rfes, rrs;
      for (std::size_t h = 0; h < res.history.size(); ++h) {
        iters.push_back(static_cast<double>(res.history[h].iter));
        objs.push_back(res.history[h].objective);
        if (cfg.solver.track_metrics) {
          raes.push_back(tracked[h][1]);
          rfes.push_back(tracked[h][2]);
          rrs.push_back(tracked[h][3]);
        }
      }
      if (cfg.solver.track_metrics)
        io::write_columns_csv(mdir / "history.csv", {"iter", "objective", "rae", "rfe", "rr"},
                              {iters, objs, raes, rfes, rrs});
      else
        io::write_columns_csv(mdir / "history.csv", {"iter", "objective"}, {iters, objs});
      io::write_table_csv(mdir / "solver.csv", {"lipschitz", "step", "iterations"},
                          {{fmt(res.lipschitz), fmt(res.step), std::to_string(res.iterations)}});
      log.line("reconstruct: " + job + " done");
    } catch (const std::exception& e) {
      results[k] = failure_from(job, e);
      log.line("reconstruct: " + job + " FAILED: " + e.what());
    }
  });

  RunReport report;
  for (auto& r : results)
    if (r) report.failures.push_back(std::move(*r));
  write_failures_csv(dir / "failures.csv", report.failures);
  update_manifest(cfg, opts, out, "reconstruct", report.failures);
  return report;
}

RunReport cmd_analyze(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.simulation) throw ConfigError("field 'simulation': section is required for analyze");
  Logger log(opts.log);
  const fs::path out = output_dir(cfg, opts);
  require_manifest(cfg, opts, out, "simulate");
  if (!cfg.models.empty()) require_manifest(cfg, opts, out, "reconstruct");
  const fs::path sim_dir = out / "simulate";
  const fs::path rec_dir = out / "reconstruct";
  const fs::path dir = out / "analysis";
  fs::create_directories(dir);

  const Geometry geom = cfg.geometry->build();
  const Image truth = truth_image(*cfg.phantom, geom.grid_n, geom.domain_side);
  const std::vector<std::uint8_t> mask =
      disk_mask(geom.grid_n, geom.pixel_size(), cfg.analysis.mask_radius);
  const FilterConfig filter{cfg.analysis.filter_epsilon, 2};
  double range = cfg.analysis.ssim_range;
  if (!(range > 0.0)) {
    const auto [lo, hi] = std::minmax_element(truth.values.begin(), truth.values.end());
    range = *hi - *lo;
  }

  const std::vector<Dataset> sets = datasets(cfg, opts);
  json windows = json::object();
  std::vector<Failure> failures;

  // first seed of each intensity gets the image-valued outputs
  std::set<std::string> first_of_intensity;
  {
    std::set<double> seen;
    for (const Dataset& d : sets)
      if (seen.insert(d.intensity).second) first_of_intensity.insert(d.name);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::vector<std::string>> ring_rows;
  std::vector<std::vector<std::string>> theta_rows;
  struct Acc {
    std::vector<double> rae, ssim, rfe, rr;
    std::vector<std::vector<double>> images;
  };
  std::map<std::pair<double, std::string>, Acc> acc;
  std::map<double, std::vector<double>> ring_norms;

  for (const Dataset& d : sets) {
    const SimulatedData sd = load_dataset(sim_dir / d.name);
    const std::vector<double> v_f = ml_flatfield(sd.flats);
    const Image psi_f = stripe_image(geom, sd.v_true, v_f, filter);
    const double psi_f_norm = frobenius(psi_f.values);
    const bool first = first_of_intensity.count(d.name) > 0;
    double psi_window = 0.0;
    for (double x : psi_f.values) psi_window = std::max(psi_window, std::abs(x));
    if (!(psi_window > 0.0)) psi_window = 1.0;

    if (cfg.analysis.ring_magnitude) {
      ring_rows.push_back({d.name, fmt(d.intensity), std::to_string(d.seed), fmt(psi_f_norm)});
      ring_norms[d.intensity].push_back(psi_f_norm);
    }
    if ((cfg.analysis.ring_magnitude || cfg.analysis.stripe_images) && first) {
      fs::create_directories(dir / "stripes");
      const std::string stem = "stripes/" + d.name + "_vf";
      write_image(dir / stem, psi_f, -psi_window, psi_window, cfg.output);
      windows[stem] = {-psi_window, psi_window};
    }

    for (const ModelConfig& mc : cfg.models) {
      if (!model_wants(mc, d, opts)) continue;
      const fs::path mdir = rec_dir / d.name / mc.spec.name;
      std::vector<std::string> row{d.name,
                                   fmt(d.intensity),
                                   std::to_string(d.seed),
                                   mc.spec.name,
                                   ringct::to_string(mc.spec.kind),
                                   to_string(mc.spec.strategy.kind),
                                   fmt(mc.spec.strategy.beta),
                                   fmt(mc.spec.tv.gamma)};
      if (!fs::exists(mdir / "image.csv")) {
        for (int k = 0; k < 4; ++k) row.push_back("nan");
        row.push_back("failed");
        rows.push_back(row);
        continue;
      }
      const Image img = io::read_image_csv(mdir / "image.csv", geom.pixel_size());
      const double e_u = rae(img.values, truth.values, mask);
      const double s = ssim(img, truth, cfg.analysis.ssim_sigma, range, mask);
      double e_v = std::nan("");
      double rr = std::nan("");
      if (fs::exists(mdir / "flatfield.csv")) {
        const std::vector<double> v_hat = io::read_vector_csv(mdir / "flatfield.csv", 1);
        e_v = rfe(v_hat, sd.v_true);
        const Image psi = stripe_image(geom, sd.v_true, v_hat, filter);
        if (psi_f_norm > 0.0) rr = frobenius(psi.values) / psi_f_norm;
        if (cfg.analysis.stripe_images && first) {
          const std::string stem = "stripes/" + d.name + "_" + mc.spec.name;
          write_image(dir / stem, psi, -psi_window, psi_window, cfg.output);
          windows[stem] = {-psi_window, psi_window};
          const std::vector<double> t1 = io::read_vector_csv(mdir / "flatfield.csv", 2);
          const std::vector<double> t2 = io::read_vector_csv(mdir / "flatfield.csv", 3);
          const std::vector<double> t3 = io::read_vector_csv(mdir / "flatfield.csv", 4);
          for (std::size_t i = 0; i < t1.size(); ++i)
            theta_rows.push_back({d.name, mc.spec.name, std::to_string(i), fmt(t1[i]), fmt(t2[i]),
                                  fmt(t3[i])});
        }
      }
      row.insert(row.end(), {fmt(e_u), fmt(s), fmt(e_v), fmt(rr), "ok"});
      rows.push_back(row);
      Acc& a = acc[{d.intensity, mc.spec.name}];
      a.rae.push_back(e_u);
      a.ssim.push_back(s);
      a.rfe.push_back(e_v);
      a.rr.push_back(rr);
      if (cfg.analysis.bias_maps) a.images.push_back(img.values);
    }
    log.line("analyze: " + d.name);
  }

  io::write_table_csv(dir / "table.csv",
                      {"dataset", "intensity", "seed", "model", "kind", "strategy", "beta", "gamma",
                       "rae", "ssim", "rfe", "rr", "status"},
                      rows);

  std::vector<std::vector<std::string>> summary;
  for (double intensity : cfg.simulation->intensities)
    for (const ModelConfig& mc : cfg.models) {
      auto it = acc.find({intensity, mc.spec.name});
      if (it == acc.end()) continue;
      const Acc& a = it->second;
      summary.push_back({fmt(intensity), mc.spec.name, ringct::to_string(mc.spec.kind),
                         to_string(mc.spec.strategy.kind), fmt(mc.spec.strategy.beta),
                         fmt(mc.spec.tv.gamma), std::to_string(a.rae.size()), fmt(mean_of(a.rae)),
                         fmt(std_of(a.rae)), fmt(mean_of(a.ssim)), fmt(mean_of(a.rfe)),
                         fmt(mean_of(a.rr))});
    }
  io::write_table_csv(dir / "summary.csv",
                      {"intensity", "model", "kind", "strategy", "beta", "gamma", "runs", "rae_mean",
                       "rae_std", "ssim_mean", "rfe_mean", "rr_mean"},
                      summary);

  if (cfg.analysis.ring_magnitude) {
    io::write_table_csv(dir / "ring_magnitude.csv", {"dataset", "intensity", "seed", "psi_norm"},
                        ring_rows);
    std::vector<std::vector<std::string>> rm;
    for (double intensity : cfg.simulation->intensities) {
      const auto& v = ring_norms[intensity];
      rm.push_back({fmt(intensity), std::to_string(v.size()), fmt(mean_of(v)), fmt(std_of(v))});
    }
    io::write_table_csv(dir / "ring_magnitude_summary.csv",
                        {"intensity", "seeds", "psi_norm_mean", "psi_norm_std"}, rm);
  }
  if (cfg.analysis.stripe_images)
    io::write_table_csv(dir / "theta.csv", {"dataset", "model", "detector", "theta1", "theta2", "theta3"},
                        theta_rows);

  if (cfg.analysis.bias_maps) {
    fs::create_directories(dir / "bias");
    for (double intensity : cfg.simulation->intensities)
      for (const ModelConfig& mc : cfg.models) {
        auto it = acc.find({intensity, mc.spec.name});
        if (it == acc.end() || it->second.images.size() < 2) continue;
        const auto& imgs = it->second.images;
        const std::size_t npx = truth.values.size();
        Image bias = Image::zeros_like(geom);
        Image sd = Image::zeros_like(geom);
        for (std::size_t k = 0; k < npx; ++k) {
          std::vector<double> x;
          for (const auto& im : imgs) x.push_back(im[k]);
          bias.values[k] = mean_of(x) - truth.values[k];
          sd.values[k] = std_of(x);
        }
        double bw = 0.0;
        double sw = 0.0;
        for (std::size_t k = 0; k < npx; ++k) {
          bw = std::max(bw, std::abs(bias.values[k]));
          sw = std::max(sw, sd.values[k]);
        }
        if (!(bw > 0.0)) bw = 1.0;
        if (!(sw > 0.0)) sw = 1.0;
        const std::string base = "bias/i" + intensity_label(intensity) + "_" + mc.spec.name;
        write_image(dir / (base + "_bias"), bias, -bw, bw, cfg.output);
        write_image(dir / (base + "_std"), sd, 0.0, sw, cfg.output);
        windows[base + "_bias"] = {-bw, bw};
        windows[base + "_std"] = {0.0, sw};
      }
  }

  RunReport report;
  report.failures = failures;
  update_manifest(cfg, opts, out, "analyze", report.failures, windows);
  return report;
}

RunReport cmd_profile(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (!cfg.profile) throw ConfigError("field 'profile': section is required for profile");
  const ProfileConfig& pc = *cfg.profile;
  const fs::path out = output_dir(cfg, opts);
  const fs::path dir = out / "profile";
  fs::create_directories(dir);
  RunReport report;

  std::vector<double> t0s, rhos, mus;
  std::vector<std::vector<std::string>> ext_rows;
  for (double t0 : pc.t0) {
    const RingProfile prof{t0, pc.epsilon};
    for (std::size_t k = 0; k < pc.samples; ++k) {
      const double rho = pc.rho_max * static_cast<double>(k) / static_cast<double>(pc.samples - 1);
      t0s.push_back(t0);
      rhos.push_back(rho);
      mus.push_back(radial_profile(rho, prof));
    }
    try {
      for (const Extremum& e : profile_extrema(prof))
        ext_rows.push_back({fmt(t0), std::to_string(e.k), fmt(e.rho), fmt(e.value)});
    } catch (const DegenerateInput& e) {
      report.failures.push_back({"profile/t0=" + fmt(t0), e.what(), true, {}});
    }
  }
  io::write_columns_csv(dir / "profile.csv", {"t0", "rho", "mu"}, {t0s, rhos, mus});
  io::write_table_csv(dir / "extrema.csv", {"t0", "k", "rho", "value"}, ext_rows);

  std::vector<double> grid;
  for (double t0 : pc.envelope_t0) {
    if (t0 == 0.0) {
      report.failures.push_back({"profile/envelope t0=0", "ring profile extrema need t0 != 0", true, {}});
      continue;
    }
    grid.push_back(t0);
  }
  const std::vector<EnvelopePoint> env = envelope(pc.epsilon, grid);
  std::vector<double> et, emax, emin;
  for (const auto& p : env) {
    et.push_back(p.t0);
    emax.push_back(p.max);
    emin.push_back(p.min);
  }
  io::write_columns_csv(dir / "envelope.csv", {"t0", "max", "min"}, {et, emax, emin});
  update_manifest(cfg, opts, out, "profile", report.failures);
  return report;
}

RunReport cmd_all(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunReport report;
  auto merge = [&](RunReport r) {
    for (auto& f : r.failures) report.failures.push_back(std::move(f));
  };
  if (cfg.simulation) {
    merge(cmd_simulate(cfg, opts));
    if (!cfg.models.empty()) merge(cmd_reconstruct(cfg, opts));
    merge(cmd_analyze(cfg, opts));
  }
  if (cfg.profile) merge(cmd_profile(cfg, opts));
  if (!cfg.simulation && !cfg.profile)
    throw ConfigError("configuration has neither a simulation nor a profile section");
  return report;
}

} // namespace ringct::cli
