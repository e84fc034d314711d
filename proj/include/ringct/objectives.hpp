#pragma once

#include "ringct/flatfield.hpp"
#include "ringct/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ringct {

/// Gamma(alpha_i, beta_i) flat-field hyperparameters, one pair per detector.
struct HyperParams {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Data-dependent constants of the joint model:
///   c = F 1 + Y 1 + alpha - 1,  d(u) = s 1 + sum_j exp(-A_j u) + beta.
struct PrecomputedStats {
  std::vector<double> c;
  std::vector<double> v_f_hat;
  std::vector<double> flat_sums;
  std::vector<double> count_sums;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::size_t s = 0;
};

enum class ObjectiveKind { baseline_map, amap, jmap, wls, swls, wlsz };

/// Upper bound applied to |[Au]_ij| before exponentiation.
inline constexpr double kExponentClamp = 700.0;

/// v_f = F 1 / s.
std::vector<double> ml_flatfield(const Sinogram& flats);

/// v_y(u)_i = sum_j y_ij / sum_j exp(-[Au]_ij).
std::vector<double> ml_flatfield_from_object(const Projector& A, std::span<const double> u,
                                             const Sinogram& counts);

/// Throws ModelDegenerate naming every detector with c_i <= 0.
PrecomputedStats precompute_stats(const Sinogram& counts, const Sinogram& flats,
                                  const HyperParams& hp);

/// J(u) = sum_ij v_i exp(-[Au]_ij) + y^T Au with gradient A^T (y - y_hat).
/// Serves the baseline MAP (true v) and AMAP (v = v_f). The gradient is
/// written to grad unless grad is empty.
double eval_grad_poisson(const Projector& A, std::span<const double> u, std::span<const double> v,
                         const Sinogram& counts, std::span<double> grad);

/// J3(u) = y^T Au + c^T log d(u), gradient A^T (y - v_hat(u) exp(-Au)).
double eval_grad_jmap(const Projector& A, std::span<const double> u, const Sinogram& counts,
                      const PrecomputedStats& stats, std::span<double> grad);

/// v_hat(u) = c / d(u) and its theta split.
FlatFieldEstimate flatfield_estimate(const Projector& A, std::span<const double> u,
                                     const Sinogram& counts, const PrecomputedStats& stats);

/// Same split from already computed tau_i(u) = sum_j exp(-[Au]_ij).
FlatFieldEstimate flatfield_estimate_from_tau(std::span<const double> tau,
                                              const PrecomputedStats& stats);

/// b_ij = log v_f,i - log y_ij. Zero counts raise PositivityViolation,
/// nonpositive v_f raises ModelDegenerate.
Sinogram quad_b_vector(const Sinogram& counts, std::span<const double> v_f);

/// J4 = 1/2 ||diag(y)^{1/2} (Au - b)||^2, gradient A^T diag(y) (Au - b).
double eval_grad_wls(const Projector& A, std::span<const double> u, const Sinogram& b,
                     const Sinogram& counts, std::span<double> grad);

/// Block-diagonal weights of the stripe-weighted models, one block per
/// detector: S_i = diag(y_i) - y_i y_i^T / den_i. Only 1/den_i is stored.
class BlockWeights {
public:
  /// den_i = s v_f,i + sum_j y_ij + alpha_i - 1. Requires
  /// s v_f,i + alpha_i - 1 > 0 (ModelDegenerate otherwise).
  static BlockWeights swls(const Sinogram& counts, std::span<const double> v_f,
                           std::span<const double> alpha, std::size_t s);
  /// den_i = sum_j y_ij + lambda_i with lambda_i > 0.
  static BlockWeights wlsz(const Sinogram& counts, std::span<const double> lambda);

  std::size_t detectors() const { return y_.detectors; }
  std::size_t projections() const { return y_.projections; }
  const std::vector<double>& inverse_denominators() const { return inv_den_; }

  /// out = S_i x for a length-p vector.
  void apply_block(std::size_t i, std::span<const double> x, std::span<double> out) const;
  /// out = S x for a full sinogram-ordered vector.
  void apply(std::span<const double> x, std::span<double> out) const;

private:
  BlockWeights(Sinogram y, std::vector<double> inv_den);
  Sinogram y_;
  std::vector<double> inv_den_;
};

/// S_i x for detector i without assembling anything else. Zero counts in
/// the row raise PositivityViolation.
std::vector<double> swls_block_apply(std::size_t i, std::span<const double> x,
                                     const Sinogram& counts, std::span<const double> v_f,
                                     std::span<const double> alpha, std::size_t s);

/// 1/2 (Au - b)^T S (Au - b) and A^T S (Au - b) for block weights S.
double eval_grad_block_wls(const Projector& A, std::span<const double> u, const Sinogram& b,
                           const BlockWeights& weights, std::span<double> grad);

/// J5 with its weights built from (Y, v_f, alpha, s).
double eval_grad_swls(const Projector& A, std::span<const double> u, const Sinogram& b,
                      const PrecomputedStats& stats, const Sinogram& counts,
                      std::span<double> grad);

/// J6 with free per-detector lambda.
double eval_grad_wlsz(const Projector& A, std::span<const double> u, const Sinogram& b,
                      const Sinogram& counts, std::span<const double> lambda,
                      std::span<double> grad);

/// ||A||_2^2 by power iteration.
double projector_norm_squared(const Projector& A, std::size_t iters = 100,
                              std::uint64_t seed = 0);

/// ||A^T diag(w) A||_2 for w >= 0.
double weighted_normal_norm(const Projector& A, std::span<const double> w,
                            std::size_t iters = 100, std::uint64_t seed = 0);

/// ||A^T S A||_2 for block weights S.
double block_normal_norm(const Projector& A, const BlockWeights& weights,
                         std::size_t iters = 100, std::uint64_t seed = 0);

/// Inputs needed by lipschitz_constant; only the fields relevant to the
/// requested kind are read.
struct LipschitzData {
  std::span<const double> v;        // baseline_map: true v; amap: v_f
  const Sinogram* counts = nullptr; // jmap, wls
  const BlockWeights* weights = nullptr; // swls, wlsz
  double norm_squared = -1.0;       // cached ||A||^2, computed when negative
};

double lipschitz_constant(ObjectiveKind kind, const Projector& A, const LipschitzData& data,
                          std::size_t iters = 100, std::uint64_t seed = 0);

/// Hessian of J3 at u applied to vec: A^T B(u) A vec with
/// B_i = diag(y_hat_i) - y_hat_i y_hat_i^T / c_i.
std::vector<double> jmap_hessian_vecprod(const Projector& A, std::span<const double> u,
                                         std::span<const double> vec,
                                         const PrecomputedStats& stats);

} // namespace ringct
