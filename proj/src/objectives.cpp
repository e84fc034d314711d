#include "ringct/objectives.hpp"

#include "ringct/errors.hpp"
#include "ringct/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ringct {

namespace {

double clamped_exp_neg(double x) {
  return std::exp(-std::clamp(x, -kExponentClamp, kExponentClamp));
}

void check_counts(const Projector& A, const Sinogram& counts) {
  const Geometry& g = A.geometry();
  if (counts.detectors != g.detectors || counts.projections != g.projections)
    throw InvalidArgument("sinogram does not match the projector geometry");
}

void check_grad(const Projector& A, std::span<const double> u, std::span<double> grad) {
  if (u.size() != A.image_size()) throw InvalidArgument("image size does not match projector");
  if (!grad.empty() && grad.size() != u.size())
    throw InvalidArgument("gradient size does not match image");
}

std::vector<double> row_sums(const Sinogram& s) {
  std::vector<double> out(s.detectors, 0.0);
  for (std::size_t i = 0; i < s.detectors; ++i)
    for (double x : s.row(i)) out[i] += x;
  return out;
}

std::string index_list(const std::vector<std::size_t>& idx) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(idx.size(), 10);
  for (std::size_t k = 0; k < shown; ++k) {
    if (k) s += ", ";
    s += std::to_string(idx[k]);
  }
  if (idx.size() > shown) s += ", ...";
  return s;
}

} // namespace

std::vector<double> ml_flatfield(const Sinogram& flats) {
  if (flats.projections < 1) throw InvalidArgument("need at least one flat-field sample");
  std::vector<double> v = row_sums(flats);
  for (double& x : v) x /= static_cast<double>(flats.projections);
  return v;
}

std::vector<double> ml_flatfield_from_object(const Projector& A, std::span<const double> u,
                                             const Sinogram& counts) {
  check_counts(A, counts);
  const std::vector<double> au = A.forward(u);
  const std::size_t p = counts.projections;
  std::vector<double> v(counts.detectors);
  for (std::size_t i = 0; i < counts.detectors; ++i) {
    double tau = 0.0;
    double ysum = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      tau += clamped_exp_neg(au[i * p + j]);
      ysum += counts.at(i, j);
    }
    v[i] = ysum / tau;
  }
  return v;
}

PrecomputedStats precompute_stats(const Sinogram& counts, const Sinogram& flats,
                                  const HyperParams& hp) {
  const std::size_t r = counts.detectors;
  if (flats.detectors != r) throw InvalidArgument("flats and counts differ in detector count");
  if (hp.alpha.size() != r || hp.beta.size() != r)
    throw InvalidArgument("hyperparameter length differs from detector count");
  PrecomputedStats st;
  st.s = flats.projections;
  if (st.s < 1) throw InvalidArgument("need at least one flat-field sample");
  st.flat_sums = row_sums(flats);
  st.count_sums = row_sums(counts);
  st.alpha = hp.alpha;
  st.beta = hp.beta;
  st.v_f_hat.resize(r);
  st.c.resize(r);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < r; ++i) {
    if (!(hp.alpha[i] >= 0.0) || !(hp.beta[i] >= 0.0))
      throw InvalidArgument("hyperparameters must be nonnegative");
    st.v_f_hat[i] = st.flat_sums[i] / static_cast<double>(st.s);
    st.c[i] = st.flat_sums[i] + st.count_sums[i] + hp.alpha[i] - 1.0;
    if (!(st.c[i] > 0.0)) bad.push_back(i);
  }
  if (!bad.empty())
    throw ModelDegenerate("joint model: c_i <= 0 at detector(s) " + index_list(bad), bad);
  return st;
}

double eval_grad_poisson(const Projector& A, std::span<const double> u, std::span<const double> v,
                         const Sinogram& counts, std::span<double> grad) {
  check_counts(A, counts);
  check_grad(A, u, grad);
  if (v.size() != counts.detectors) throw InvalidArgument("flat-field length mismatch");
  for (double x : v)
    if (!(x > 0.0)) throw InvalidArgument("Poisson objective needs a positive flat-field");
  std::vector<double> au = A.forward(u);
  const std::size_t p = counts.projections;
  double value = 0.0;
  for (std::size_t i = 0; i < counts.detectors; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t k = i * p + j;
      const double y = counts.values[k];
      const double yhat = v[i] * clamped_exp_neg(au[k]);
      value += yhat + y * au[k];
      au[k] = y - yhat;
    }
  }
  if (!grad.empty()) A.adjoint(au, grad);
  return value;
}

double eval_grad_jmap(const Projector& A, std::span<const double> u, const Sinogram& counts,
                      const PrecomputedStats& stats, std::span<double> grad) {
  check_counts(A, counts);
  check_grad(A, u, grad);
  if (stats.c.size() != counts.detectors) throw InvalidArgument("stats do not match counts");
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < stats.c.size(); ++i)
    if (!(stats.c[i] > 0.0)) bad.push_back(i);
  if (!bad.empty())
    throw ModelDegenerate("joint model: c_i <= 0 at detector(s) " + index_list(bad), bad);

  std::vector<double> au = A.forward(u);
  const std::size_t p = counts.projections;
  const double s = static_cast<double>(stats.s);
  double value = 0.0;
  for (std::size_t i = 0; i < counts.detectors; ++i) {
    double tau = 0.0;
    double linear = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t k = i * p + j;
      linear += counts.values[k] * au[k];
      au[k] = clamped_exp_neg(au[k]);
      tau += au[k];
    }
    const double d = s + tau + stats.beta[i];
    value += linear + stats.c[i] * std::log(d);
    const double vhat = stats.c[i] / d;
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t k = i * p + j;
      au[k] = counts.values[k] - vhat * au[k];
    }
  }
  if (!grad.empty()) A.adjoint(au, grad);
  return value;
}

FlatFieldEstimate flatfield_estimate_from_tau(std::span<const double> tau,
                                              const PrecomputedStats& stats) {
  const std::size_t r = tau.size();
  if (stats.c.size() != r) throw InvalidArgument("stats do not match detector count");
  const double s = static_cast<double>(stats.s);
  FlatFieldEstimate est;
  est.v_hat.resize(r);
  est.theta1.resize(r);
  est.theta2.resize(r);
  est.theta3.resize(r);
  est.v_y.resize(r);
  est.v_prior.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double d = s + tau[i] + stats.beta[i];
    est.v_hat[i] = stats.c[i] / d;
    est.theta1[i] = s / d;
    est.theta2[i] = tau[i] / d;
    est.theta3[i] = stats.beta[i] / d;
    est.v_y[i] = stats.count_sums[i] / tau[i];
    est.v_prior[i] = stats.beta[i] > 0.0 ? (stats.alpha[i] - 1.0) / stats.beta[i] : 0.0;
  }
  return est;
}

FlatFieldEstimate flatfield_estimate(const Projector& A, std::span<const double> u,
                                     const Sinogram& counts, const PrecomputedStats& stats) {
  check_counts(A, counts);
  const std::vector<double> au = A.forward(u);
  const std::size_t p = counts.projections;
  std::vector<double> tau(counts.detectors, 0.0);
  for (std::size_t i = 0; i < counts.detectors; ++i)
    for (std::size_t j = 0; j < p; ++j) tau[i] += clamped_exp_neg(au[i * p + j]);
  return flatfield_estimate_from_tau(tau, stats);
}

Sinogram quad_b_vector(const Sinogram& counts, std::span<const double> v_f) {
  if (v_f.size() != counts.detectors) throw InvalidArgument("flat-field length mismatch");
  std::vector<std::size_t> bad_det;
  for (std::size_t i = 0; i < v_f.size(); ++i)
    if (!(v_f[i] > 0.0)) bad_det.push_back(i);
  if (!bad_det.empty())
    throw ModelDegenerate("flat-field estimate is zero at detector(s) " + index_list(bad_det),
                          bad_det);
  std::vector<PositivityViolation::Cell> bad;
  Sinogram b = Sinogram::zeros(counts.detectors, counts.projections, SinogramKind::log_ratio);
  for (std::size_t i = 0; i < counts.detectors; ++i) {
    const double lv = std::log(v_f[i]);
    for (std::size_t j = 0; j < counts.projections; ++j) {
      const double y = counts.at(i, j);
      if (!(y > 0.0)) {
        bad.push_back({i, j});
        continue;
      }
      b.at(i, j) = lv - std::log(y);
    }
  }
  if (!bad.empty()) {
    const std::string msg = "zero counts in " + std::to_string(bad.size()) + " cell(s); first at (" +
                            std::to_string(bad.front().detector) + ", " +
                            std::to_string(bad.front().projection) + ")";
    throw PositivityViolation(msg, std::move(bad));
  }
  return b;
}

double eval_grad_wls(const Projector& A, std::span<const double> u, const Sinogram& b,
                     const Sinogram& counts, std::span<double> grad) {
  check_counts(A, counts);
  check_counts(A, b);
  check_grad(A, u, grad);
  std::vector<double> z = A.forward(u);
  double value = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double res = z[k] - b.values[k];
    const double w = counts.values[k] * res;
    value += 0.5 * res * w;
    z[k] = w;
  }
  if (!grad.empty()) A.adjoint(z, grad);
  return value;
}

BlockWeights::BlockWeights(Sinogram y, std::vector<double> inv_den)
    : y_(std::move(y)), inv_den_(std::move(inv_den)) {}

BlockWeights BlockWeights::swls(const Sinogram& counts, std::span<const double> v_f,
                                std::span<const double> alpha, std::size_t s) {
  const std::size_t r = counts.detectors;
  if (v_f.size() != r || alpha.size() != r) throw InvalidArgument("SWLS weights: length mismatch");
  const std::vector<double> ysum = row_sums(counts);
  std::vector<double> inv(r);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < r; ++i) {
    const double kappa = static_cast<double>(s) * v_f[i] + alpha[i] - 1.0;
    if (!(kappa > 0.0)) bad.push_back(i);
    inv[i] = 1.0 / (kappa + ysum[i]);
  }
  if (!bad.empty())
    throw ModelDegenerate("SWLS: s v_f + alpha - 1 <= 0 at detector(s) " + index_list(bad), bad);
  return BlockWeights(counts, std::move(inv));
}

BlockWeights BlockWeights::wlsz(const Sinogram& counts, std::span<const double> lambda) {
  const std::size_t r = counts.detectors;
  if (lambda.size() != r) throw InvalidArgument("WLS-z weights: lambda length mismatch");
  const std::vector<double> ysum = row_sums(counts);
  std::vector<double> inv(r);
  for (std::size_t i = 0; i < r; ++i) {
    if (!(lambda[i] > 0.0)) throw InvalidArgument("WLS-z needs lambda > 0");
    inv[i] = std::isinf(lambda[i]) ? 0.0 : 1.0 / (ysum[i] + lambda[i]);
  }
  return BlockWeights(counts, std::move(inv));
}

void BlockWeights::apply_block(std::size_t i, std::span<const double> x,
                               std::span<double> out) const {
  const std::size_t p = y_.projections;
  if (i >= y_.detectors) throw InvalidArgument("detector index out of range");
  if (x.size() != p || out.size() != p) throw InvalidArgument("block apply: length mismatch");
  const std::span<const double> y = y_.row(i);
  double dot = 0.0;
  for (std::size_t j = 0; j < p; ++j) dot += y[j] * x[j];
  const double scale = dot * inv_den_[i];
  for (std::size_t j = 0; j < p; ++j) out[j] = y[j] * x[j] - scale * y[j];
}

void BlockWeights::apply(std::span<const double> x, std::span<double> out) const {
  const std::size_t p = y_.projections;
  if (x.size() != y_.values.size() || out.size() != x.size())
    throw InvalidArgument("block apply: length mismatch");
  for (std::size_t i = 0; i < y_.detectors; ++i)
    apply_block(i, x.subspan(i * p, p), out.subspan(i * p, p));
}

std::vector<double> swls_block_apply(std::size_t i, std::span<const double> x,
                                     const Sinogram& counts, std::span<const double> v_f,
                                     std::span<const double> alpha, std::size_t s) {
  if (i >= counts.detectors) throw InvalidArgument("detector index out of range");
  const double kappa = static_cast<double>(s) * v_f[i] + alpha[i] - 1.0;
  if (!(kappa > 0.0))
    throw ModelDegenerate("SWLS: s v_f + alpha - 1 <= 0 at detector " + std::to_string(i), {i});
  const std::span<const double> y = counts.row(i);
  if (x.size() != y.size()) throw InvalidArgument("block apply: length mismatch");
  std::vector<PositivityViolation::Cell> zeros;
  double ysum = 0.0;
  double dot = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!(y[j] > 0.0)) zeros.push_back({i, j});
    ysum += y[j];
    dot += y[j] * x[j];
  }
  if (!zeros.empty())
    throw PositivityViolation("SWLS block " + std::to_string(i) + " has zero counts", std::move(zeros));
  const double scale = dot / (kappa + ysum);
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] * x[j] - scale * y[j];
  return out;
}

double eval_grad_block_wls(const Projector& A, std::span<const double> u, const Sinogram& b,
                           const BlockWeights& weights, std::span<double> grad) {
  check_counts(A, b);
  check_grad(A, u, grad);
  if (weights.detectors() != b.detectors || weights.projections() != b.projections)
    throw InvalidArgument("block weights do not match sinogram");
  std::vector<double> z = A.forward(u);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] -= b.values[k];
  std::vector<double> w(z.size());
  weights.apply(z, w);
  double value = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) value += z[k] * w[k];
  if (!grad.empty()) A.adjoint(w, grad);
  return 0.5 * value;
}

double eval_grad_swls(const Projector& A, std::span<const double> u, const Sinogram& b,
                      const PrecomputedStats& stats, const Sinogram& counts,
                      std::span<double> grad) {
  const BlockWeights w = BlockWeights::swls(counts, stats.v_f_hat, stats.alpha, stats.s);
  return eval_grad_block_wls(A, u, b, w, grad);
}

double eval_grad_wlsz(const Projector& A, std::span<const double> u, const Sinogram& b,
                      const Sinogram& counts, std::span<const double> lambda,
                      std::span<double> grad) {
  const BlockWeights w = BlockWeights::wlsz(counts, lambda);
  return eval_grad_block_wls(A, u, b, w, grad);
}

double projector_norm_squared(const Projector& A, std::size_t iters, std::uint64_t seed) {
  return power_iteration([&](auto x, auto y) { A.forward(x, y); },
                         [&](auto y, auto x) { A.adjoint(y, x); }, A.image_size(),
                         A.sinogram_size(), iters, seed);
}

double weighted_normal_norm(const Projector& A, std::span<const double> w, std::size_t iters,
                            std::uint64_t seed) {
  if (w.size() != A.sinogram_size()) throw InvalidArgument("weight length mismatch");
  std::vector<double> tmp(A.sinogram_size());
  return power_iteration_psd(
      [&](std::span<const double> x, std::span<double> out) {
        A.forward(x, tmp);
        for (std::size_t k = 0; k < tmp.size(); ++k) tmp[k] *= w[k];
        A.adjoint(tmp, out);
      },
      A.image_size(), iters, seed);
}

double block_normal_norm(const Projector& A, const BlockWeights& weights, std::size_t iters,
                         std::uint64_t seed) {
  std::vector<double> tmp(A.sinogram_size());
  std::vector<double> tmp2(A.sinogram_size());
  return power_iteration_psd(
      [&](std::span<const double> x, std::span<double> out) {
        A.forward(x, tmp);
        weights.apply(tmp, tmp2);
        A.adjoint(tmp2, out);
      },
      A.image_size(), iters, seed);
}

double lipschitz_constant(ObjectiveKind kind, const Projector& A, const LipschitzData& data,
                          std::size_t iters, std::uint64_t seed) {
  switch (kind) {
  case ObjectiveKind::baseline_map:
  case ObjectiveKind::amap: {
    if (data.v.empty()) throw InvalidArgument("Lipschitz constant needs a flat-field");
    const double nrm = data.norm_squared >= 0.0 ? data.norm_squared
                                                : projector_norm_squared(A, iters, seed);
    return *std::max_element(data.v.begin(), data.v.end()) * nrm;
  }
  case ObjectiveKind::jmap:
  case ObjectiveKind::wls:
    if (!data.counts) throw InvalidArgument("Lipschitz constant needs the counts");
    return weighted_normal_norm(A, data.counts->values, iters, seed);
  case ObjectiveKind::swls:
  case ObjectiveKind::wlsz:
    if (!data.weights) throw InvalidArgument("Lipschitz constant needs block weights");
    return block_normal_norm(A, *data.weights, iters, seed);
  }
  throw InvalidArgument("unknown objective kind");
}

std::vector<double> jmap_hessian_vecprod(const Projector& A, std::span<const double> u,
                                         std::span<const double> vec,
                                         const PrecomputedStats& stats) {
  if (vec.size() != A.image_size()) throw InvalidArgument("direction size mismatch");
  const Geometry& g = A.geometry();
  const std::size_t p = g.projections;
  std::vector<double> e = A.forward(u);
  std::vector<double> q = A.forward(vec);
  const double s = static_cast<double>(stats.s);
  for (std::size_t i = 0; i < g.detectors; ++i) {
    double tau = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      e[i * p + j] = clamped_exp_neg(e[i * p + j]);
      tau += e[i * p + j];
    }
    const double vhat = stats.c[i] / (s + tau + stats.beta[i]);
    double dot = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      e[i * p + j] *= vhat;
      dot += e[i * p + j] * q[i * p + j];
    }
    const double scale = dot / stats.c[i];
    for (std::size_t j = 0; j < p; ++j) {
      const std::size_t k = i * p + j;
      q[k] = e[k] * q[k] - scale * e[k];
    }
  }
  return A.adjoint(q);
}

} // namespace ringct
