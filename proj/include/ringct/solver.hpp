#pragma once

#include "ringct/flatfield.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ringct {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Estimate of ||Op||_2^2 by iterating x <- normalize(Op^T Op x) from a
/// seeded random start. Returns 0 for the zero operator.
double power_iteration(const LinearMap& apply, const LinearMap& adjoint_apply, std::size_t in_dim,
                       std::size_t out_dim, std::size_t iters, std::uint64_t seed);

/// Largest eigenvalue of a symmetric positive semidefinite operator.
double power_iteration_psd(const LinearMap& apply, std::size_t dim, std::size_t iters,
                           std::uint64_t seed);

/// Smooth part g of min g(u) + I_+(u). evaluate returns g(u) and writes the
/// gradient into its second argument unless that span is empty.
struct SmoothObjective {
  std::function<double(std::span<const double>, std::span<double>)> evaluate;
  double lipschitz = 0.0;
};

/// Composite problem: smooth term, optional support mask (pixels with 0 are
/// held at zero) and an optional flat-field estimator v_hat(u) used for
/// reporting.
struct Problem {
  SmoothObjective smooth;
  std::vector<std::uint8_t> support;
  std::function<FlatFieldEstimate(std::span<const double>)> flatfield;
};

enum class InitKind { zeros, image, fbp };

struct SolverConfig {
  std::size_t max_iters = 500;
  double step_factor = 1.8; // t = step_factor / L, in (0, 2)
  InitKind init = InitKind::zeros;
  std::size_t record_every = 1;
  /// Assert g(u_k) is non-increasing. Defaults to on when step_factor <= 1.
  std::optional<bool> check_descent;
  /// Replaces the problem's Lipschitz constant when set.
  std::optional<double> lipschitz_override;

  void validate() const;
};

struct IterationRecord {
  std::size_t iter;
  double objective;
};

struct SolveResult {
  std::vector<double> image;
  std::vector<IterationRecord> history;
  std::optional<FlatFieldEstimate> flatfield;
  double lipschitz = 0.0;
  double step = 0.0;
  std::size_t iterations = 0;
};

/// Called with (iteration, iterate, v_hat(iterate) or nullptr).
using IterateCallback =
    std::function<void(std::size_t, std::span<const double>, const FlatFieldEstimate*)>;

class SolverDiverged : public std::runtime_error {
public:
  SolverDiverged(std::size_t iter, std::vector<double> snapshot);
  std::size_t iteration() const noexcept { return iter_; }
  const std::vector<double>& snapshot() const noexcept { return snapshot_; }

private:
  std::size_t iter_;
  std::vector<double> snapshot_;
};

class DescentViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Fixed-step projected gradient: u <- P(u - t grad g(u)), K iterations,
/// where P projects onto the nonnegative orthant (and the support mask).
/// The objective g(u_k) is recorded every record_every iterations and at K.
SolveResult prox_gradient(const Problem& problem, const SolverConfig& config,
                          std::vector<double> initial, const IterateCallback& callback = {});

struct Stage {
  Problem problem;
  SolverConfig config;
};

/// Runs the stages in order; each stage starts from the previous final
/// iterate. History iteration numbers are cumulative.
SolveResult warm_start_chain(std::span<const Stage> stages, std::vector<double> initial,
                             const IterateCallback& callback = {});

} // namespace ringct
