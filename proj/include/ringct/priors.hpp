#pragma once

#include "ringct/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ringct {

struct HuberValue {
  double value;
  double derivative;
};

/// xi_delta(t) = t^2 / (2 delta) for |t| <= delta, |t| - delta/2 otherwise.
HuberValue huber(double t, double delta);

struct TvConfig {
  double delta = 0.01; // cm^-1
  double gamma = 0.0;
};

/// Analytic bound on ||D||_2^2 for 2D forward differences.
inline constexpr double kDifferenceNormSquared = 8.0;

/// Lipschitz constant of grad TV_delta, ||D||^2 / delta.
double tv_lipschitz(double delta);

/// TV_delta(u) = sum_i xi_delta(||D_i u||_2) on an n x n image using forward
/// differences with a zero last row/column. Adds the gradient to grad when
/// grad is nonempty (grad must then have n*n entries and is not cleared).
double tv_eval_grad(std::span<const double> image, std::size_t n, double delta,
                    std::span<double> grad);

/// Projection onto the nonnegative orthant, in place.
void project_nonneg(std::span<double> values);
Image project_nonneg(Image img);

enum class FlatPriorKind { uniform, jeffreys, flatfield_emphasizing, type2 };

struct FlatPriorStrategy {
  FlatPriorKind kind = FlatPriorKind::uniform;
  double beta = 0.0; // FE only
};

/// Gamma(alpha_i, beta_i) hyperparameters for the flat-field prior.
/// For the type-II strategy the estimate degenerates to a zero-variance prior
/// at the flat-field ML estimate; alpha/beta are then left empty and
/// amap_equivalent is set. Detectors with zero flat counts (no information
/// for the type-II fit) are listed in degenerate_detectors.
struct FlatPrior {
  std::vector<double> alpha;
  std::vector<double> beta;
  bool amap_equivalent = false;
  std::vector<std::size_t> degenerate_detectors;
};

FlatPrior make_hyperparams(const FlatPriorStrategy& strategy, std::span<const double> vf_hat,
                           std::size_t samples, const Sinogram& flats);

struct Kappa {
  double value;
  double first;
  double second;
};

/// Negative log marginal of the flats of one detector after eliminating
/// beta = s * alpha / k, with derivatives in alpha. k is the summed count.
Kappa type2_kappa(double alpha, std::int64_t k);

} // namespace ringct
