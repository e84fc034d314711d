// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include "ringct/cli/config.hpp"
#include "ringct/cli/pipeline.hpp"
#include "ringct/errors.hpp"
#include "ringct/fbp.hpp"
#include "ringct/io.hpp"
#include "ringct/metrics.hpp"
#include "ringct/models.hpp"
#include "ringct/objectives.hpp"
#include "ringct/phantoms.hpp"
#include "ringct/priors.hpp"
#include "ringct/simulate.hpp"
#include "ringct/solver.hpp"
#include "support.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace ringct;
using namespace ringct::test;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Instance {
  std::shared_ptr<Projector> A;
  std::vector<double> v, u;
  Sinogram counts, flats;
  HyperParams hp;
  PrecomputedStats stats;
};

Instance make_instance(std::uint32_t trial, std::size_t n = 12, std::size_t r = 16, std::size_t p = 10) {
  Instance in;
  in.A = std::make_shared<Projector>(build_parallel_geometry(r, p, 1.5, 1.0, n, AngleSpan::half));
  in.v = uniform_vector(r, 100.0, 300.0, 1001, trial);
  const auto l = in.A->forward(uniform_vector(in.A->image_size(), 0.0, 1.0, 1002, trial));
  std::vector<double> mean(l.size());
  for (std::size_t k = 0; k < l.size(); ++k) mean[k] = in.v[k / p] * std::exp(-l[k]);
  in.counts = random_counts(r, p, mean, 1003 + trial);
  for (double& y : in.counts.values) y = std::max(y, 1.0);
  FlatFieldTruth truth;
  truth.v = in.v;
  in.flats = sample_flats(truth, 5, 1004 + trial);
  in.u = uniform_vector(in.A->image_size(), 0.0, 1.2, 1005, trial);
  const auto vf = ml_flatfield(in.flats);
  const double beta = 20.0 * CounterRng(1006, StreamDomain::test, trial).uniform();
  in.hp.beta.assign(r, beta);
  in.hp.alpha.resize(r);
  for (std::size_t i = 0; i < r; ++i) in.hp.alpha[i] = 1.0 + beta * vf[i];
  in.stats = precompute_stats(in.counts, in.flats, in.hp);
  return in;
}

using Objective = std::function<double(std::span<const double>, std::span<double>)>;

double fd_relative_error(const Objective& f, std::vector<double> u) {
  std::vector<double> g(u.size()), fd(u.size());
  f(u, g);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double h = 1e-5 * (1.0 + std::abs(u[k]));
    const double keep = u[k];
    u[k] = keep + h;
    const double fp = f(u, {});
    u[k] = keep - h;
    const double fm = f(u, {});
    u[k] = keep;
    fd[k] = (fp - fm) / (2.0 * h);
  }
  return rel_diff(fd, g);
}

Outcome gradients() {
  Stopwatch clock;
  std::map<std::string, double> worst;
  for (std::uint32_t trial = 0; trial < 20; ++trial) {
    const Instance in = make_instance(trial);
    const Projector& A = *in.A;
    const auto vf = ml_flatfield(in.flats);
    const Sinogram b = quad_b_vector(in.counts, vf);
    const auto lambda = uniform_vector(16, 10.0, 1000.0, 1007, trial);
    const std::vector<std::pair<std::string, Objective>> fns{
        {"J1", [&](auto u, auto g) { return eval_grad_poisson(A, u, in.v, in.counts, g); }},
        {"J2", [&](auto u, auto g) { return eval_grad_poisson(A, u, vf, in.counts, g); }},
        {"J3", [&](auto u, auto g) { return eval_grad_jmap(A, u, in.counts, in.stats, g); }},
        {"J4", [&](auto u, auto g) { return eval_grad_wls(A, u, b, in.counts, g); }},
        {"J5", [&](auto u, auto g) { return eval_grad_swls(A, u, b, in.stats, in.counts, g); }},
        {"J6", [&](auto u, auto g) { return eval_grad_wlsz(A, u, b, in.counts, lambda, g); }},
        {"TV", [&](auto u, auto g) {
           if (!g.empty()) std::fill(g.begin(), g.end(), 0.0);
           return tv_eval_grad(u, 12, 0.3, g);
         }}};
    for (const auto& [name, f] : fns) worst[name] = std::max(worst[name], fd_relative_error(f, in.u));
  }
  Outcome o;
  for (const auto& [name, err] : worst) {
    const bool quadratic = name == "J4" || name == "J5" || name == "J6";
    if (err > (quadratic ? 1e-8 : 1e-5)) o.pass = false;
    o.detail += name + " " + num(err) + ", ";
  }
  const double t = clock.seconds();
  if (t >= 30.0) o.pass = false;
  o.detail += "runtime " + num(t) + " s";
  return o;
}

Outcome theta_identity() {
  double sum_err = 0.0, combo_err = 0.0;
  for (std::uint32_t trial = 0; trial < 50; ++trial) {
    const Instance in = make_instance(trial, 8, 10, 6);
    const auto vf = ml_flatfield(in.flats);
    const FlatFieldEstimate est = flatfield_estimate(*in.A, in.u, in.counts, in.stats);
    for (std::size_t i = 0; i < vf.size(); ++i) {
      sum_err = std::max(sum_err, std::abs(est.theta1[i] + est.theta2[i] + est.theta3[i] - 1.0));
      const double vpr = (in.hp.alpha[i] - 1.0) / in.hp.beta[i];
      const double combo = est.theta1[i] * vf[i] + est.theta2[i] * est.v_y[i] + est.theta3[i] * vpr;
      combo_err = std::max(combo_err, std::abs(combo - est.v_hat[i]));
    }
  }
  return {sum_err <= 1e-12 && combo_err <= 1e-12,
          "max |sum theta - 1| " + num(sum_err) + ", max |combination - v_hat| " + num(combo_err)};
}

Outcome woodbury() {
  const std::size_t r = 4, p = 6, s = 3;
  const Sinogram y = random_counts(r, p, uniform_vector(r * p, 20.0, 80.0, 1011), 1012);
  const auto vf = uniform_vector(r, 30.0, 90.0, 1013);
  const auto alpha = uniform_vector(r, 1.0, 5.0, 1014);
  const BlockWeights W = BlockWeights::swls(y, vf, alpha, s);
  const auto m = static_cast<Eigen::Index>(r * p);
  Eigen::MatrixXd S(m, m), Sigma = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> e(r * p, 0.0), col(r * p);
  for (Eigen::Index k = 0; k < m; ++k) {
    e[static_cast<std::size_t>(k)] = 1.0;
    W.apply(e, col);
    e[static_cast<std::size_t>(k)] = 0.0;
    for (Eigen::Index q = 0; q < m; ++q) S(q, k) = col[static_cast<std::size_t>(q)];
  }
  for (std::size_t i = 0; i < r; ++i) {
    const double kappa = static_cast<double>(s) * vf[i] + alpha[i] - 1.0;
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t jj = 0; jj < p; ++jj)
        Sigma(static_cast<Eigen::Index>(i * p + j), static_cast<Eigen::Index>(i * p + jj)) = 1.0 / kappa;
      Sigma(static_cast<Eigen::Index>(i * p + j), static_cast<Eigen::Index>(i * p + j)) += 1.0 / y.at(i, j);
    }
  }
  const double id_err = (S * Sigma - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();

  double eq_err = 0.0;
  for (std::uint32_t trial = 0; trial < 10; ++trial) {
    const Instance in = make_instance(trial);
    const auto v_f = ml_flatfield(in.flats);
    std::vector<double> lambda(16);
    for (std::size_t i = 0; i < 16; ++i) lambda[i] = 5.0 * v_f[i] + in.hp.alpha[i] - 1.0;
    const Sinogram b = quad_b_vector(in.counts, v_f);
    std::vector<double> g5(in.A->image_size()), g6(in.A->image_size());
    const double j5 = eval_grad_swls(*in.A, in.u, b, in.stats, in.counts, g5);
    const double j6 = eval_grad_wlsz(*in.A, in.u, b, in.counts, lambda, g6);
    eq_err = std::max({eq_err, std::abs(j5 - j6) / std::abs(j6), rel_diff(g5, g6)});
  }
  return {id_err <= 1e-8 && eq_err <= 1e-12,
          "max |S Sigma - I| " + num(id_err) + ", SWLS vs WLS-z relative " + num(eq_err)};
}

Outcome ring_profile() {
  Stopwatch clock;
  Outcome o;
  // one-detector stripe, full rotation, evaluated along the x axis
  const double dt = 0.0025;
  const std::size_t r = 1601, i0 = 1000;
  const Geometry g = build_parallel_geometry(r, 4096, static_cast<double>(r) * dt, 2.0, 8, AngleSpan::full);
  const double t0 = g.detector_offset(i0);
  Sinogram s = Sinogram::zeros_like(g, SinogramKind::log_ratio);
  for (std::size_t j = 0; j < g.projections; ++j) s.at(i0, j) = 1.0 / dt;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k <= 380; ++k) {
    xs.push_back(1.9 * static_cast<double>(k) / 380.0);
    ys.push_back(0.0);
  }
  for (double eps : {0.02, 0.05, 0.1}) {
    const auto numeric = fbp_at_points(g, s, {eps, 2}, xs, ys);
    double worst = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double ana = radial_profile(xs[k], {t0, eps});
      peak = std::max(peak, std::abs(ana));
      if (std::abs(xs[k] - std::abs(t0)) >= 3.0 * eps) worst = std::max(worst, std::abs(numeric[k] - ana));
    }
    if (worst > 0.02 * peak) o.pass = false;
    o.detail += "FBP eps " + num(eps) + ": " + num(100.0 * worst / peak) + "% of peak, ";
  }

  double deriv = 0.0, value = 0.0;
  for (double eps : {0.01, 0.02, 0.05, 0.1})
    for (double t : {-1.5, -0.3, 0.05, 0.2, 0.5, 1.0, 4.0}) {
      const RingProfile pr{t, eps};
      const auto ext = profile_extrema(pr);
      for (std::size_t k = 1; k < ext.size(); ++k) {
        deriv = std::max(deriv, std::abs(radial_profile_derivative(ext[k].rho, pr)));
        const double ref = radial_profile(ext[k].rho, pr);
        value = std::max(value, std::abs(ext[k].value - ref) / std::abs(ref));
      }
    }
  if (deriv > 1e-8 || value > 1e-10) o.pass = false;
  o.detail += "max |mu'(rho_k)| " + num(deriv) + ", extremum value error " + num(value) + ", ";

  // peak * sqrt(eps^3 |t0|) should not depend on (eps, t0) once t0 >= 50 eps
  std::vector<double> scaled;
  for (double eps : {0.01, 0.02})
    for (double t : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      double m = 0.0;
      for (const Extremum& e : profile_extrema({t, eps})) m = std::max(m, std::abs(e.value));
      scaled.push_back(m * std::sqrt(eps * eps * eps * t));
    }
  double mean = 0.0;
  for (double x : scaled) mean += x / static_cast<double>(scaled.size());
  double spread = 0.0;
  for (double x : scaled) spread = std::max(spread, std::abs(x / mean - 1.0));
  if (spread > 0.1) o.pass = false;
  const double t = clock.seconds();
  if (t >= 60.0) o.pass = false;
  o.detail += "scaling spread " + num(100.0 * spread) + "%, runtime " + num(t) + " s";
  return o;
}

Outcome ring_magnitude() {
  const Geometry g = build_parallel_geometry(200, 720, 1.5, 1.0, 128, AngleSpan::full);
  const std::vector<double> omegas{1e3, 1e4, 1e5};
  std::vector<double> mean(3, 0.0);
  bool per_seed_monotone = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<double> norms;
    for (double w : omegas) {
      const FlatFieldTruth truth = constant_flatfield(w, 200);
      const auto vf = ml_flatfield(sample_flats(truth, 1, seed));
      double s = 0.0;
      for (double x : stripe_image(g, truth.v, vf, {}).values) s += x * x;
      norms.push_back(std::sqrt(s));
    }
    for (std::size_t k = 0; k < 3; ++k) mean[k] += norms[k] / 10.0;
    if (!(norms[0] > norms[1] && norms[1] > norms[2])) per_seed_monotone = false;
  }
  const double r1 = mean[0] / mean[1], r2 = mean[1] / mean[2], target = std::sqrt(10.0);
  const bool pass = per_seed_monotone && std::abs(r1 / target - 1.0) <= 0.25 && std::abs(r2 / target - 1.0) <= 0.25;
  return {pass, "mean norms " + num(mean[0]) + ", " + num(mean[1]) + ", " + num(mean[2]) + "; ratios " + num(r1) +
                    ", " + num(r2) + " vs " + num(target) + (per_seed_monotone ? "; every seed monotone" : "; not monotone")};
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t k = 0; k < header.size() && k < cells.size(); ++k) row[header[k]] = cells[k];
    rows.push_back(row);
  }
  return rows;
}

Outcome table_trend(const fs::path& run, double seconds) {
  std::map<std::string, std::map<std::string, std::string>> by_model;
  for (auto& row : read_csv(run / "analysis/summary.csv")) by_model[row["model"]] = row;
  auto get = [&](const std::string& model, const std::string& col) { return std::stod(by_model.at(model).at(col)); };
  const double rae_amap = get("amap", "rae_mean"), rae_j10 = get("jmap_b10", "rae_mean");
  const double rae_s10 = get("swls_b10", "rae_mean");
  const double rr_amap = get("amap", "rr_mean"), rr_j0 = get("jmap_b0", "rr_mean");
  const bool runs_ok = get("amap", "runs") == 5 && get("jmap_b10", "runs") == 5;
  const bool rae_ok = rae_j10 <= 0.95 * rae_amap;
  const bool rr_ok = rr_j0 < rr_amap;
  const bool swls_ok = std::abs(rae_s10 - rae_j10) <= 2.0;
  return {runs_ok && rae_ok && rr_ok && swls_ok && seconds < 600.0,
          std::string("RAE JMAP(b=10) ") + num(rae_j10) + " vs AMAP " + num(rae_amap) + (rae_ok ? " ok" : " FAIL") +
              "; RR JMAP(b=0) " + num(rr_j0) + " vs AMAP " + num(rr_amap) + (rr_ok ? " ok" : " FAIL") +
              "; RAE SWLS(b=10) " + num(rae_s10) + (swls_ok ? " ok" : " FAIL") + "; runtime " + num(seconds) + " s"};
}

Outcome beta_limit() {
  const Geometry g = build_parallel_geometry(96, 120, 2.0, 2.0, 64, AngleSpan::half);
  GrainsSpec gs;
  gs.num_grains = 40;
  gs.high = 1.2;
  const Image truth = grains(gs, g.forward_grid_n, g.domain_side);
  const FlatFieldTruth v = sample_flatfield_truth(500.0, g.detectors, 11);
  ScanContext ctx(std::make_shared<Projector>(g), {sample_measurements(v, g, truth, 12), sample_flats(v, 5, 13), v.v});
  ModelSpec amap, jmap;
  amap.kind = ObjectiveKind::amap;
  jmap.kind = ObjectiveKind::jmap;
  jmap.strategy = {FlatPriorKind::flatfield_emphasizing, 1e8};
  const Problem pa = build_problem(amap, ctx), pj = build_problem(jmap, ctx);
  SolverConfig cfg;
  cfg.max_iters = 300;
  cfg.lipschitz_override = pa.smooth.lipschitz;
  const std::vector<double> zero(64 * 64, 0.0);
  const double d = rel_diff(prox_gradient(pj, cfg, zero).image, prox_gradient(pa, cfg, zero).image);
  return {d <= 1e-3, "relative 2-norm difference " + num(d)};
}

Outcome type2() {
  double max_first = -INFINITY, min_second = INFINITY;
  for (int a = 0; a <= 300; ++a) {
    const double alpha = 0.1 * std::pow(1000.0, a / 300.0);
    for (std::int64_t k = 1; k <= 50; ++k) {
      const Kappa kp = type2_kappa(alpha, k);
      max_first = std::max(max_first, kp.first);
      min_second = std::min(min_second, kp.second);
    }
  }
  Sinogram flats = Sinogram::zeros(3, 4, SinogramKind::counts);
  flats.values = {5, 7, 6, 4, 50, 52, 49, 51, 1, 0, 2, 1};
  const FlatPrior prior = make_hyperparams({FlatPriorKind::type2, 0.0}, ml_flatfield(flats), 4, flats);
  const bool ok = max_first < 0.0 && min_second > 0.0 && prior.amap_equivalent;
  return {ok, "max kappa' " + num(max_first) + ", min kappa'' " + num(min_second) +
                  (prior.amap_equivalent ? ", reports AMAP equivalence" : ", no AMAP equivalence")};
}

Outcome solver_contracts() {
  Outcome o;
  const Geometry g = build_parallel_geometry(48, 60, 2.0, 2.0, 32, AngleSpan::half);
  GrainsSpec gs;
  gs.num_grains = 20;
  gs.high = 1.2;
  const Image truth = grains(gs, g.forward_grid_n, g.domain_side);
  const FlatFieldTruth v = sample_flatfield_truth(500.0, g.detectors, 21);
  ScanContext ctx(std::make_shared<Projector>(g), {sample_measurements(v, g, truth, 22), sample_flats(v, 5, 23), v.v});
  std::size_t runs = 0;
  for (ObjectiveKind kind : {ObjectiveKind::baseline_map, ObjectiveKind::amap, ObjectiveKind::jmap,
                             ObjectiveKind::wls, ObjectiveKind::swls, ObjectiveKind::wlsz})
    for (double gamma : {0.0, 3.0}) {
      ModelSpec spec;
      spec.kind = kind;
      spec.strategy = {FlatPriorKind::flatfield_emphasizing, 10.0};
      spec.lambda = 100.0;
      spec.pseudo_count = true;
      spec.tv = {0.01, gamma};
      SolverConfig cfg;
      cfg.max_iters = 500;
      cfg.step_factor = 1.0;
      cfg.check_descent = true;
      try {
        prox_gradient(build_problem(spec, ctx), cfg, std::vector<double>(32 * 32, 0.0));
        ++runs;
      } catch (const std::exception& e) {
        o.pass = false;
        o.detail += to_string(kind) + " gamma " + num(gamma) + ": " + e.what() + "; ";
      }
    }
  o.detail += std::to_string(runs) + "/12 full runs descend; ";

  double worst = 0.0;
  for (std::uint32_t trial = 0; trial < 10; ++trial) {
    const auto rows = static_cast<Eigen::Index>(10 + 3 * trial), cols = static_cast<Eigen::Index>(25 - 2 * trial);
    const auto vals = uniform_vector(static_cast<std::size_t>(rows * cols), -1.0, 1.0, 1021, trial);
    const Eigen::MatrixXd M = Eigen::Map<const Eigen::MatrixXd>(vals.data(), rows, cols);
    const Eigen::MatrixXd Mt = M.transpose();
    auto map = [](const Eigen::MatrixXd& X) {
      return [X](std::span<const double> x, std::span<double> y) {
        const Eigen::VectorXd r = X * Eigen::Map<const Eigen::VectorXd>(x.data(), X.cols());
        std::copy(r.data(), r.data() + r.size(), y.begin());
      };
    };
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
    const double est = std::sqrt(power_iteration(map(M), map(Mt), static_cast<std::size_t>(cols),
                                                 static_cast<std::size_t>(rows), 100, 7 + trial));
    worst = std::max(worst, std::abs(est / sigma - 1.0));
  }
  if (worst > 0.01) o.pass = false;
  o.detail += "power iteration max relative error " + num(worst);
  return o;
}

/// Runs every preset into out/<name>; returns the seconds spent on table1.
double run_presets(const fs::path& configs, const fs::path& out, const std::vector<std::string>& names) {
  double table1 = 0.0;
  for (const auto& name : names) {
    Stopwatch clock;
    cli::RunOptions opts;
    opts.out = out / name;
    fs::remove_all(*opts.out);
    const cli::RunReport report = cli::cmd_all(cli::load_config(configs / (name + ".yaml")), opts);
    if (!report.failures.empty()) throw std::runtime_error("preset " + name + " reported failures");
    if (name == "table1") table1 = clock.seconds();
  }
  return table1;
}

Outcome determinism(const fs::path& a, const fs::path& b, const std::vector<std::string>& names) {
  std::size_t csvs = 0, files = 0, differing = 0;
  std::string first_diff;
  for (const auto& name : names)
    for (const auto& entry : fs::recursive_directory_iterator(a / name)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), a / name);
      ++files;
      if (rel.extension() == ".csv") ++csvs;
      if (!fs::exists(b / name / rel) || io::sha256_file(entry.path()) != io::sha256_file(b / name / rel)) {
        ++differing;
        if (first_diff.empty()) first_diff = (fs::path(name) / rel).string();
      }
    }
  return {differing == 0 && csvs > 0, std::to_string(files) + " files (" + std::to_string(csvs) + " CSV) compared, " +
                                          std::to_string(differing) + " differ" +
                                          (first_diff.empty() ? "" : ", first " + first_diff)};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string configs = RINGCT_CONFIG_DIR;
  std::string work = (fs::temp_directory_path() / "ringct_acceptance").string();
  std::vector<int> only;
  app.add_option("--configs", configs, "directory with the preset configs");
  app.add_option("--work", work, "scratch directory for the preset runs");
  app.add_option("--only", only, "criteria to run (default all)");
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
  const std::vector<std::string> presets{"fig1", "fig2", "table1", "fig5", "fig6", "fig7"};
  const fs::path first = fs::path(work) / "run1", second = fs::path(work) / "run2";
  double table1_seconds = 0.0;
  bool presets_ran = false;

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradients},
      {"flat-field weight identity", theta_identity},
      {"stripe weights by Woodbury", woodbury},
      {"closed-form ring profile", ring_profile},
      {"ring magnitude against flat-field intensity", ring_magnitude},
      {"desk-scale grains study trends",
       [&] {
         if (!presets_ran) {
           table1_seconds = run_presets(configs, first, presets);
           presets_ran = true;
         }
         return table_trend(first / "table1", table1_seconds);
       }},
      {"large beta limit", beta_limit},
      {"type-II flat-field prior", type2},
      {"solver contracts", solver_contracts},
      {"end-to-end determinism",
       [&] {
         if (!presets_ran) {
           run_presets(configs, first, presets);
           presets_ran = true;
         }
         run_presets(configs, second, presets);
         return determinism(first, second, presets);
       }},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!wanted(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
