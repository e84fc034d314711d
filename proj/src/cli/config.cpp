#include "ringct/cli/config.hpp"

#include "ringct/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace ringct::cli {

namespace {

std::string where(const YAML::Node& node, const std::string& field) {
  const YAML::Mark m = node.Mark();
  if (m.line >= 0) return "line " + std::to_string(m.line + 1) + ", field '" + field + "'";
  return "field '" + field + "'";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) {
  throw ConfigError(where(node, field) + ": " + msg);
}

/// A mapping node that rejects keys nobody asked for.
class Section {
public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_, "expected a table");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return static_cast<bool>(node_[key]);
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }

  template <class T> T get(const std::string& key) {
    if (!has(key)) fail(node_, field(key), "required field is missing");
    return convert<T>(node_[key], field(key));
  }

  template <class T> T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(node_[key], field(key));
  }

  template <class T> std::vector<T> list(const std::string& key) {
    if (!has(key)) fail(node_, field(key), "required field is missing");
    return list_of<T>(node_[key], field(key));
  }

  template <class T> std::vector<T> list(const std::string& key, std::vector<T> fallback) {
    if (!has(key)) return fallback;
    return list_of<T>(node_[key], field(key));
  }

  void finish() const {
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, field(key), "unknown field");
    }
  }

  template <class T> static T convert(const YAML::Node& n, const std::string& f) {
    if (!n.IsScalar()) fail(n, f, "expected a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, f, "cannot convert '" + n.Scalar() + "'");
    }
  }

  template <class T> static std::vector<T> list_of(const YAML::Node& n, const std::string& f) {
    if (n.IsScalar()) return {convert<T>(n, f)};
    if (!n.IsSequence()) fail(n, f, "expected a list");
    std::vector<T> out;
    for (std::size_t k = 0; k < n.size(); ++k)
      out.push_back(convert<T>(n[k], f + "[" + std::to_string(k) + "]"));
    return out;
  }

  const YAML::Node& node() const { return node_; }

private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

AngleSpan parse_span(const std::string& s, const YAML::Node& n, const std::string& f) {
  if (s == "half") return AngleSpan::half;
  if (s == "full") return AngleSpan::full;
  fail(n, f, "expected 'half' or 'full'");
}

InitKind parse_init(const std::string& s, const YAML::Node& n, const std::string& f) {
  if (s == "zeros") return InitKind::zeros;
  if (s == "fbp") return InitKind::fbp;
  fail(n, f, "expected 'zeros' or 'fbp'");
}

GeometryConfig parse_geometry(Section sec) {
  GeometryConfig g;
  g.detectors = sec.get<std::size_t>("detectors");
  g.projections = sec.get<std::size_t>("projections");
  g.detector_width = sec.get<double>("detector_width");
  g.domain_side = sec.get<double>("domain_side");
  g.grid_n = sec.get<std::size_t>("grid_n");
  g.forward_grid_n = sec.get<std::size_t>("forward_grid_n", 0);
  g.span = parse_span(sec.get<std::string>("angle_span", "half"), sec.raw("angle_span"),
                      sec.field("angle_span"));
  sec.finish();
  if (g.forward_grid_n != 0 && g.forward_grid_n <= g.grid_n)
    fail(sec.raw("forward_grid_n"), sec.field("forward_grid_n"), "must be finer than grid_n");
  try {
    g.build();
  } catch (const InvalidArgument& e) {
    fail(sec.node(), "geometry", e.what());
  }
  return g;
}

PhantomConfig parse_phantom(Section sec) {
  PhantomConfig p;
  const std::string kind = sec.get<std::string>("kind");
  if (kind == "three_squares")
    p.kind = PhantomKind::three_squares;
  else if (kind == "grains")
    p.kind = PhantomKind::grains;
  else if (kind == "shepp_logan")
    p.kind = PhantomKind::shepp_logan;
  else
    fail(sec.raw("kind"), sec.field("kind"), "unknown phantom '" + kind + "'");
  p.grains.seed = sec.get<std::uint64_t>("seed", p.grains.seed);
  p.grains.num_grains = sec.get<std::size_t>("num_grains", p.grains.num_grains);
  p.grains.low = sec.get<double>("low", p.grains.low);
  p.grains.high = sec.get<double>("high", p.grains.high);
  p.grains.mask_radius = sec.get<double>("mask_radius", p.grains.mask_radius);
  if (p.grains.num_grains < 1) fail(sec.raw("num_grains"), sec.field("num_grains"), "must be >= 1");
  if (!(p.grains.low >= 0.0) || !(p.grains.high >= p.grains.low))
    fail(sec.node(), sec.field("low"), "need 0 <= low <= high");
  sec.finish();
  return p;
}

SimulationConfig parse_simulation(Section sec) {
  SimulationConfig s;
  const std::string mode = sec.get<std::string>("flatfield", "poisson");
  if (mode == "exact")
    s.flatfield = FlatFieldMode::exact;
  else if (mode == "poisson")
    s.flatfield = FlatFieldMode::poisson;
  else
    fail(sec.raw("flatfield"), sec.field("flatfield"), "expected 'exact' or 'poisson'");
  s.intensities = sec.list<double>("intensity");
  for (double x : s.intensities)
    if (!(x > 0.0)) fail(sec.raw("intensity"), sec.field("intensity"), "must be positive");
  s.flat_samples = sec.get<std::size_t>("flat_samples");
  if (s.flat_samples < 1) fail(sec.raw("flat_samples"), sec.field("flat_samples"), "must be >= 1");
  s.seeds = sec.list<std::uint64_t>("seeds");
  if (s.seeds.empty()) fail(sec.raw("seeds"), sec.field("seeds"), "at least one seed is required");
  sec.finish();
  return s;
}

FlatPriorStrategy parse_strategy(const std::string& s, double beta, const YAML::Node& n,
                                 const std::string& f) {
  FlatPriorStrategy st;
  st.beta = beta;
  if (s == "uniform")
    st.kind = FlatPriorKind::uniform;
  else if (s == "jeffreys")
    st.kind = FlatPriorKind::jeffreys;
  else if (s == "fe")
    st.kind = FlatPriorKind::flatfield_emphasizing;
  else if (s == "type2")
    st.kind = FlatPriorKind::type2;
  else
    fail(n, f, "expected uniform, jeffreys, fe or type2");
  if (!(beta >= 0.0)) fail(n, f, "beta must be nonnegative");
  return st;
}

ModelConfig parse_model(Section sec) {
  ModelConfig m;
  const std::string kind = sec.get<std::string>("kind");
  try {
    m.spec.kind = objective_from_string(kind);
  } catch (const InvalidArgument&) {
    fail(sec.raw("kind"), sec.field("kind"), "unknown model kind '" + kind + "'");
  }
  m.spec.name = sec.get<std::string>("name", kind);
  const double beta = sec.get<double>("beta", 0.0);
  m.spec.strategy = parse_strategy(sec.get<std::string>("strategy", beta > 0.0 ? "fe" : "uniform"),
                                   beta, sec.raw("strategy"), sec.field("strategy"));
  m.spec.lambda = sec.get<double>("lambda", 0.0);
  if (m.spec.kind == ObjectiveKind::wlsz && !(m.spec.lambda > 0.0))
    fail(sec.node(), sec.field("lambda"), "wlsz needs lambda > 0");
  m.spec.tv.gamma = sec.get<double>("gamma", 0.0);
  m.spec.tv.delta = sec.get<double>("delta", 0.01);
  if (!(m.spec.tv.gamma >= 0.0)) fail(sec.raw("gamma"), sec.field("gamma"), "must be >= 0");
  if (!(m.spec.tv.delta > 0.0)) fail(sec.raw("delta"), sec.field("delta"), "must be > 0");
  m.spec.pseudo_count = sec.get<bool>("pseudo_count", false);
  if (sec.has("max_iters")) m.max_iters = sec.get<std::size_t>("max_iters");
  if (sec.has("init"))
    m.init = parse_init(sec.get<std::string>("init"), sec.raw("init"), sec.field("init"));
  m.warm_start_iters = sec.get<std::size_t>("warm_start_iters", 0);
  m.seeds = sec.list<std::uint64_t>("seeds", {});
  sec.finish();
  return m;
}

SolverBlock parse_solver(Section sec) {
  SolverBlock s;
  s.max_iters = sec.get<std::size_t>("max_iters", s.max_iters);
  s.step_factor = sec.get<double>("step_factor", s.step_factor);
  if (sec.has("init"))
    s.init = parse_init(sec.get<std::string>("init"), sec.raw("init"), sec.field("init"));
  s.record_every = sec.get<std::size_t>("record_every", s.record_every);
  s.track_metrics = sec.get<bool>("track_metrics", s.track_metrics);
  s.support_radius = sec.get<double>("support_radius", s.support_radius);
  if (!(s.support_radius >= 0.0))
    fail(sec.raw("support_radius"), sec.field("support_radius"), "must be >= 0");
  if (s.max_iters < 1) fail(sec.raw("max_iters"), sec.field("max_iters"), "must be >= 1");
  if (!(s.step_factor > 0.0 && s.step_factor < 2.0))
    fail(sec.raw("step_factor"), sec.field("step_factor"), "must lie in (0, 2)");
  if (s.record_every < 1) fail(sec.raw("record_every"), sec.field("record_every"), "must be >= 1");
  sec.finish();
  return s;
}

AnalysisConfig parse_analysis(Section sec) {
  AnalysisConfig a;
  a.mask_radius = sec.get<double>("mask_radius", a.mask_radius);
  a.ssim_sigma = sec.get<double>("ssim_sigma", a.ssim_sigma);
  a.ssim_range = sec.get<double>("ssim_range", a.ssim_range);
  a.filter_epsilon = sec.get<double>("filter_epsilon", a.filter_epsilon);
  a.ring_magnitude = sec.get<bool>("ring_magnitude", a.ring_magnitude);
  a.stripe_images = sec.get<bool>("stripe_images", a.stripe_images);
  a.bias_maps = sec.get<bool>("bias_maps", a.bias_maps);
  if (!(a.mask_radius > 0.0)) fail(sec.raw("mask_radius"), sec.field("mask_radius"), "must be > 0");
  if (!(a.ssim_sigma > 0.0)) fail(sec.raw("ssim_sigma"), sec.field("ssim_sigma"), "must be > 0");
  if (!(a.filter_epsilon >= 0.0))
    fail(sec.raw("filter_epsilon"), sec.field("filter_epsilon"), "must be >= 0");
  sec.finish();
  return a;
}

ProfileConfig parse_profile(Section sec) {
  ProfileConfig p;
  p.epsilon = sec.get<double>("epsilon", p.epsilon);
  p.t0 = sec.list<double>("t0");
  p.rho_max = sec.get<double>("rho_max", p.rho_max);
  p.samples = sec.get<std::size_t>("samples", p.samples);
  p.envelope_t0 = sec.list<double>("envelope_t0", {});
  if (!(p.epsilon > 0.0)) fail(sec.raw("epsilon"), sec.field("epsilon"), "must be > 0");
  if (!(p.rho_max > 0.0)) fail(sec.raw("rho_max"), sec.field("rho_max"), "must be > 0");
  if (p.samples < 2) fail(sec.raw("samples"), sec.field("samples"), "must be >= 2");
  sec.finish();
  return p;
}

OutputConfig parse_output(Section sec) {
  OutputConfig o;
  o.directory = sec.get<std::string>("directory", o.directory.string());
  const std::vector<double> window = sec.list<double>("window", {o.window_lo, o.window_hi});
  if (window.size() != 2 || !(window[1] > window[0]))
    fail(sec.raw("window"), sec.field("window"), "expected [lo, hi] with hi > lo");
  o.window_lo = window[0];
  o.window_hi = window[1];
  const std::vector<std::string> formats = sec.list<std::string>("formats", {"pgm", "csv"});
  o.pgm = o.csv = false;
  for (const auto& f : formats) {
    if (f == "pgm")
      o.pgm = true;
    else if (f == "csv")
      o.csv = true;
    else
      fail(sec.raw("formats"), sec.field("formats"), "unknown format '" + f + "'");
  }
  sec.finish();
  return o;
}

} // namespace

Geometry GeometryConfig::build() const {
  return build_parallel_geometry(detectors, projections, detector_width, domain_side, grid_n, span,
                                 forward_grid_n);
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError("configuration is empty");
  Section top(root, "");
  ExperimentConfig cfg;
  cfg.source_text = text;
  cfg.name = top.get<std::string>("name", "experiment");
  if (top.has("geometry")) cfg.geometry = parse_geometry(Section(top.raw("geometry"), "geometry"));
  if (top.has("phantom")) cfg.phantom = parse_phantom(Section(top.raw("phantom"), "phantom"));
  if (top.has("simulation"))
    cfg.simulation = parse_simulation(Section(top.raw("simulation"), "simulation"));
  if (top.has("models")) {
    const YAML::Node models = top.raw("models");
    if (!models.IsSequence()) fail(models, "models", "expected a list of tables");
    std::set<std::string> names;
    for (std::size_t k = 0; k < models.size(); ++k) {
      ModelConfig m = parse_model(Section(models[k], "models[" + std::to_string(k) + "]"));
      if (!names.insert(m.spec.name).second)
        fail(models[k], "models[" + std::to_string(k) + "].name",
             "duplicate model name '" + m.spec.name + "'");
      cfg.models.push_back(std::move(m));
    }
  }
  if (top.has("solver")) cfg.solver = parse_solver(Section(top.raw("solver"), "solver"));
  if (top.has("analysis")) cfg.analysis = parse_analysis(Section(top.raw("analysis"), "analysis"));
  if (top.has("profile")) cfg.profile = parse_profile(Section(top.raw("profile"), "profile"));
  if (top.has("output")) cfg.output = parse_output(Section(top.raw("output"), "output"));
  top.finish();

  if (cfg.simulation && (!cfg.geometry || !cfg.phantom))
    throw ConfigError("field 'simulation': needs both a geometry and a phantom section");
  if (!cfg.models.empty() && !cfg.simulation)
    throw ConfigError("field 'models': reconstruction needs a simulation section");
  if (cfg.phantom && cfg.geometry && cfg.phantom->kind == PhantomKind::three_squares &&
      cfg.geometry->domain_side != 1.0)
    throw ConfigError("field 'geometry.domain_side': the three_squares phantom lives on a 1 cm domain");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
  case PhantomKind::three_squares: return "three_squares";
  case PhantomKind::grains: return "grains";
  case PhantomKind::shepp_logan: return "shepp_logan";
  }
  return "unknown";
}

std::string to_string(InitKind kind) {
  switch (kind) {
  case InitKind::zeros: return "zeros";
  case InitKind::image: return "image";
  case InitKind::fbp: return "fbp";
  }
  return "unknown";
}

std::string to_string(FlatPriorKind kind) {
  switch (kind) {
  case FlatPriorKind::uniform: return "uniform";
  case FlatPriorKind::jeffreys: return "jeffreys";
  case FlatPriorKind::flatfield_emphasizing: return "fe";
  case FlatPriorKind::type2: return "type2";
  }
  return "unknown";
}

} // namespace ringct::cli
