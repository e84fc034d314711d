#include "ringct/models.hpp"

#include "ringct/errors.hpp"
#include "ringct/fbp.hpp"

#include <algorithm>
#include <cmath>

namespace ringct {

namespace {

constexpr std::size_t kPowerIters = 100;
constexpr std::uint64_t kPowerSeed = 0x5eed;

Sinogram with_pseudo_counts(const Sinogram& counts) {
  Sinogram out = counts;
  for (double& y : out.values) y += 0.5;
  return out;
}

std::vector<double> tau_of(const Projector& A, std::span<const double> u) {
  const std::vector<double> au = A.forward(u);
  const std::size_t p = A.geometry().projections;
  std::vector<double> tau(A.geometry().detectors, 0.0);
  for (std::size_t i = 0; i < tau.size(); ++i)
    for (std::size_t j = 0; j < p; ++j)
      tau[i] += std::exp(-std::clamp(au[i * p + j], -kExponentClamp, kExponentClamp));
  return tau;
}

HyperParams uniform_params(std::size_t r) {
  return {std::vector<double>(r, 1.0), std::vector<double>(r, 0.0)};
}

struct ModelState {
  std::shared_ptr<const Projector> A;
  Sinogram counts;
  std::vector<double> v;             // poisson models
  PrecomputedStats stats;            // jmap, swls; also used for reporting
  Sinogram b;                        // wls family
  std::optional<BlockWeights> weights;
  bool fixed_flatfield = false;      // type-II: v_hat is pinned to v_f
};

void require_positive_flatfield(std::span<const double> v, const char* what) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0)) bad.push_back(i);
  if (!bad.empty())
    throw ModelDegenerate(std::string(what) + ": flat-field estimate is zero at " +
                              std::to_string(bad.size()) + " detector(s), first " +
                              std::to_string(bad.front()),
                          bad);
}

} // namespace

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
  case ObjectiveKind::baseline_map: return "baseline";
  case ObjectiveKind::amap: return "amap";
  case ObjectiveKind::jmap: return "jmap";
  case ObjectiveKind::wls: return "wls";
  case ObjectiveKind::swls: return "swls";
  case ObjectiveKind::wlsz: return "wlsz";
  }
  return "unknown";
}

ObjectiveKind objective_from_string(const std::string& name) {
  for (ObjectiveKind k : {ObjectiveKind::baseline_map, ObjectiveKind::amap, ObjectiveKind::jmap,
                          ObjectiveKind::wls, ObjectiveKind::swls, ObjectiveKind::wlsz})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown model kind '" + name + "'");
}

ScanContext::ScanContext(std::shared_ptr<const Projector> projector, ScanData data)
    : projector_(std::move(projector)), data_(std::move(data)) {
  const Geometry& g = projector_->geometry();
  if (data_.counts.detectors != g.detectors || data_.counts.projections != g.projections)
    throw InvalidArgument("counts do not match the projector geometry");
  if (data_.flats.detectors != g.detectors)
    throw InvalidArgument("flats do not match the detector count");
  v_f_ = ml_flatfield(data_.flats);
}

double default_norm_squared(const Projector& A) {
  return projector_norm_squared(A, kPowerIters, kPowerSeed);
}

double ScanContext::norm_squared() const {
  if (!norm_sq_) norm_sq_ = default_norm_squared(*projector_);
  return *norm_sq_;
}

Problem build_problem(const ModelSpec& spec, const ScanContext& ctx,
                      std::vector<std::uint8_t> support) {
  const Projector& A = ctx.projector();
  const std::size_t r = A.geometry().detectors;
  const std::size_t n = A.geometry().grid_n;
  if (!support.empty() && support.size() != A.image_size())
    throw InvalidArgument("support mask does not match the image grid");
  if (spec.tv.gamma < 0.0) throw InvalidArgument("TV weight must be nonnegative");

  auto st = std::make_shared<ModelState>();
  st->A = ctx.projector_ptr();
  st->counts = ctx.data().counts;
  const std::vector<double>& v_f = ctx.v_f();

  std::function<double(std::span<const double>, std::span<double>)> data_term;
  double lipschitz = 0.0;
  ObjectiveKind kind = spec.kind;

  HyperParams hp = uniform_params(r);
  if (kind == ObjectiveKind::jmap || kind == ObjectiveKind::swls) {
    const FlatPrior prior = make_hyperparams(spec.strategy, v_f, ctx.data().flats.projections,
                                             ctx.data().flats);
    if (prior.amap_equivalent) {
      if (kind == ObjectiveKind::jmap) kind = ObjectiveKind::amap;
      st->fixed_flatfield = true;
    } else {
      hp = {prior.alpha, prior.beta};
    }
  }
  st->stats = precompute_stats(st->counts, ctx.data().flats, hp);

  switch (kind) {
  case ObjectiveKind::baseline_map:
  case ObjectiveKind::amap: {
    if (kind == ObjectiveKind::baseline_map) {
      if (ctx.data().v_true.size() != r)
        throw InvalidArgument("baseline model needs the true flat-field");
      st->v = ctx.data().v_true;
    } else {
      st->v = v_f;
    }
    require_positive_flatfield(st->v, to_string(kind).c_str());
    data_term = [st](std::span<const double> u, std::span<double> g) {
      return eval_grad_poisson(*st->A, u, st->v, st->counts, g);
    };
    LipschitzData ld;
    ld.v = st->v;
    ld.norm_squared = ctx.norm_squared();
    lipschitz = lipschitz_constant(kind, A, ld);
    break;
  }
  case ObjectiveKind::jmap: {
    data_term = [st](std::span<const double> u, std::span<double> g) {
      return eval_grad_jmap(*st->A, u, st->counts, st->stats, g);
    };
    LipschitzData ld;
    ld.counts = &st->counts;
    lipschitz = lipschitz_constant(kind, A, ld, kPowerIters, kPowerSeed);
    break;
  }
  case ObjectiveKind::wls:
  case ObjectiveKind::swls:
  case ObjectiveKind::wlsz: {
    const Sinogram y = spec.pseudo_count ? with_pseudo_counts(st->counts) : st->counts;
    require_positive_flatfield(v_f, to_string(kind).c_str());
    st->b = quad_b_vector(y, v_f);
    if (kind == ObjectiveKind::wls) {
      auto yw = std::make_shared<Sinogram>(y);
      data_term = [st, yw](std::span<const double> u, std::span<double> g) {
        return eval_grad_wls(*st->A, u, st->b, *yw, g);
      };
      LipschitzData ld;
      ld.counts = yw.get();
      lipschitz = lipschitz_constant(kind, A, ld, kPowerIters, kPowerSeed);
    } else {
      if (kind == ObjectiveKind::swls) {
        st->weights = BlockWeights::swls(y, v_f, st->stats.alpha, st->stats.s);
      } else {
        if (!(spec.lambda > 0.0)) throw InvalidArgument("WLS-z needs lambda > 0");
        st->weights = BlockWeights::wlsz(y, std::vector<double>(r, spec.lambda));
      }
      data_term = [st](std::span<const double> u, std::span<double> g) {
        return eval_grad_block_wls(*st->A, u, st->b, *st->weights, g);
      };
      LipschitzData ld;
      ld.weights = &*st->weights;
      lipschitz = lipschitz_constant(kind, A, ld, kPowerIters, kPowerSeed);
    }
    break;
  }
  }

  Problem problem;
  problem.support = std::move(support);
  const TvConfig tv = spec.tv;
  if (tv.gamma > 0.0) {
    lipschitz += tv.gamma * tv_lipschitz(tv.delta);
    problem.smooth.evaluate = [data_term, tv, n](std::span<const double> u, std::span<double> g) {
      double value = data_term(u, g);
      if (g.empty()) return value + tv.gamma * tv_eval_grad(u, n, tv.delta, {});
      std::vector<double> tg(u.size(), 0.0);
      value += tv.gamma * tv_eval_grad(u, n, tv.delta, tg);
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += tv.gamma * tg[k];
      return value;
    };
  } else {
    problem.smooth.evaluate = data_term;
  }
  problem.smooth.lipschitz = lipschitz;

  problem.flatfield = [st, v_f](std::span<const double> u) {
    FlatFieldEstimate est = flatfield_estimate_from_tau(tau_of(*st->A, u), st->stats);
    if (st->fixed_flatfield) {
      est.v_hat = v_f;
      std::fill(est.theta1.begin(), est.theta1.end(), 1.0);
      std::fill(est.theta2.begin(), est.theta2.end(), 0.0);
      std::fill(est.theta3.begin(), est.theta3.end(), 0.0);
      est.v_prior = v_f;
    }
    return est;
  };
  return problem;
}

std::vector<double> fbp_initial_image(const ScanContext& ctx,
                                      const std::vector<std::uint8_t>& support) {
  const Geometry& g = ctx.projector().geometry();
  const Sinogram& y = ctx.data().counts;
  Sinogram b = Sinogram::zeros_like(g, SinogramKind::log_ratio);
  for (std::size_t i = 0; i < g.detectors; ++i) {
    const double vf = std::max(ctx.v_f()[i], 0.5);
    for (std::size_t j = 0; j < g.projections; ++j)
      b.at(i, j) = std::log(vf) - std::log(std::max(y.at(i, j), 0.5));
  }
  std::vector<double> u = fbp(g, b, {}).values;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!support.empty() && !support[k]) u[k] = 0.0;
    u[k] = std::max(u[k], 0.0);
  }
  return u;
}

} // namespace ringct
