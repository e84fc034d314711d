#include "ringct/priors.hpp"

#include "ringct/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ringct {

HuberValue huber(double t, double delta) {
  const double a = std::abs(t);
  if (a <= delta) return {t * t / (2.0 * delta), t / delta};
  return {a - 0.5 * delta, t > 0 ? 1.0 : -1.0};
}

double tv_lipschitz(double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("Huber parameter must be positive");
  return kDifferenceNormSquared / delta;
}

double tv_eval_grad(std::span<const double> u, std::size_t n, double delta,
                    std::span<double> grad) {
  if (!(delta > 0.0)) throw InvalidArgument("Huber parameter must be positive");
  if (u.size() != n * n) throw InvalidArgument("TV: image size mismatch");
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != u.size()) throw InvalidArgument("TV: gradient size mismatch");

  double tv = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t k = r * n + c;
      const double gx = c + 1 < n ? u[k + 1] - u[k] : 0.0;
      const double gy = r + 1 < n ? u[k + n] - u[k] : 0.0;
      const double m = std::hypot(gx, gy);
      tv += huber(m, delta).value;
      if (!want_grad || m == 0.0) continue;
      // xi'(m) / m
      const double w = m <= delta ? 1.0 / delta : 1.0 / m;
      grad[k] -= w * (gx + gy);
      if (c + 1 < n) grad[k + 1] += w * gx;
      if (r + 1 < n) grad[k + n] += w * gy;
    }
  }
  return tv;
}

void project_nonneg(std::span<double> values) {
  for (double& x : values) x = std::max(0.0, x);
}

Image project_nonneg(Image img) {
  project_nonneg(img.values);
  return img;
}

FlatPrior make_hyperparams(const FlatPriorStrategy& strategy, std::span<const double> vf_hat,
                           std::size_t samples, const Sinogram& flats) {
  const std::size_t r = vf_hat.size();
  FlatPrior prior;
  switch (strategy.kind) {
  case FlatPriorKind::uniform:
    prior.alpha.assign(r, 1.0);
    prior.beta.assign(r, 0.0);
    break;
  case FlatPriorKind::jeffreys:
    prior.alpha.assign(r, 0.5);
    prior.beta.assign(r, 0.0);
    break;
  case FlatPriorKind::flatfield_emphasizing:
    if (!(strategy.beta >= 0.0)) throw InvalidArgument("FE prior needs beta >= 0");
    prior.beta.assign(r, strategy.beta);
    prior.alpha.resize(r);
    for (std::size_t i = 0; i < r; ++i) prior.alpha[i] = 1.0 + strategy.beta * vf_hat[i];
    break;
  case FlatPriorKind::type2: {
    if (flats.detectors != r) throw InvalidArgument("flats do not match flat-field estimate");
    // kappa' < 0 on the whole positive axis whenever k_i >= 1, so the fit
    // runs off to alpha -> infinity with alpha / beta = k_i / s.
    prior.amap_equivalent = true;
    for (std::size_t i = 0; i < r; ++i) {
      double k = 0.0;
      for (std::size_t j = 0; j < flats.projections; ++j) k += flats.at(i, j);
      if (k == 0.0) prior.degenerate_detectors.push_back(i);
    }
    (void)samples;
    break;
  }
  }
  return prior;
}

Kappa type2_kappa(double alpha, std::int64_t k) {
  if (!(alpha > 0.0)) throw InvalidArgument("type-II kappa needs alpha > 0");
  if (k < 0) throw InvalidArgument("type-II kappa needs k >= 0");
  if (k == 0) return {0.0, 0.0, 0.0};
  const auto kd = static_cast<double>(k);
  Kappa out{};
  out.value = -(std::lgamma(kd + alpha) - std::lgamma(alpha)) - alpha * std::log(alpha / (alpha + kd)) -
              kd * std::log(kd / (alpha + kd));
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::int64_t l = 0; l < k; ++l) {
    const double x = alpha + static_cast<double>(l);
    s1 += 1.0 / x;
    s2 += 1.0 / (x * x);
  }
  out.first = -s1 + std::log1p(kd / alpha);
  out.second = s2 - kd / (alpha * (alpha + kd));
  return out;
}

} // namespace ringct
