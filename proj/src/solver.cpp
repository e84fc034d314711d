#include "ringct/solver.hpp"

#include "ringct/errors.hpp"
#include "ringct/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ringct {

namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

std::vector<double> random_unit(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed, StreamDomain::power_iteration);
  std::vector<double> x(dim);
  for (double& v : x) v = rng.uniform() - 0.5;
  const double nrm = norm2(x);
  for (double& v : x) v /= nrm;
  return x;
}

void project_feasible(std::span<double> u, const std::vector<std::uint8_t>& support) {
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!support.empty() && support[k] == 0)
      u[k] = 0.0;
    else if (u[k] < 0.0)
      u[k] = 0.0;
  }
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

} // namespace

double power_iteration(const LinearMap& apply, const LinearMap& adjoint_apply, std::size_t in_dim,
                       std::size_t out_dim, std::size_t iters, std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("power iteration needs at least one iteration");
  if (in_dim == 0) return 0.0;
  std::vector<double> x = random_unit(in_dim, seed);
  std::vector<double> z(out_dim);
  std::vector<double> w(in_dim);
  double estimate = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    apply(x, z);
    adjoint_apply(z, w);
    estimate = norm2(w);
    if (estimate == 0.0) return 0.0;
    for (std::size_t k = 0; k < in_dim; ++k) x[k] = w[k] / estimate;
  }
  return estimate;
}

double power_iteration_psd(const LinearMap& apply, std::size_t dim, std::size_t iters,
                           std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("power iteration needs at least one iteration");
  if (dim == 0) return 0.0;
  std::vector<double> x = random_unit(dim, seed);
  std::vector<double> w(dim);
  double estimate = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    apply(x, w);
    estimate = norm2(w);
    if (estimate == 0.0) return 0.0;
    for (std::size_t k = 0; k < dim; ++k) x[k] = w[k] / estimate;
  }
  return estimate;
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("solver needs at least one iteration");
  if (!(step_factor > 0.0 && step_factor < 2.0))
    throw InvalidArgument("step_factor must lie in (0, 2)");
  if (record_every < 1) throw InvalidArgument("record_every must be positive");
  if (lipschitz_override && !(*lipschitz_override > 0.0))
    throw InvalidArgument("Lipschitz override must be positive");
}

SolverDiverged::SolverDiverged(std::size_t iter, std::vector<double> snapshot)
    : std::runtime_error("non-finite objective or gradient at iteration " + std::to_string(iter)),
      iter_(iter), snapshot_(std::move(snapshot)) {}

SolveResult prox_gradient(const Problem& problem, const SolverConfig& config,
                          std::vector<double> initial, const IterateCallback& callback) {
  config.validate();
  const double lipschitz = config.lipschitz_override.value_or(problem.smooth.lipschitz);
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw InvalidArgument("Lipschitz constant must be positive and finite");
  if (!problem.support.empty() && problem.support.size() != initial.size())
    throw InvalidArgument("support mask size mismatch");

  SolveResult result;
  result.lipschitz = lipschitz;
  result.step = config.step_factor / lipschitz;
  result.iterations = config.max_iters;

  std::vector<double> u = std::move(initial);
  project_feasible(u, problem.support);
  std::vector<double> grad(u.size());
  const bool check = config.check_descent.value_or(config.step_factor <= 1.0);
  double previous = 0.0;

  auto report = [&](std::size_t k, double value) {
    result.history.push_back({k, value});
    if (!callback) return;
    if (problem.flatfield) {
      const FlatFieldEstimate est = problem.flatfield(u);
      callback(k, u, &est);
    } else {
      callback(k, u, nullptr);
    }
  };
  auto check_value = [&](std::size_t k, double value) {
    if (!std::isfinite(value)) throw SolverDiverged(k, u);
    if (check && k > 0 && value > previous + 1e-12 * std::max(1.0, std::abs(previous)))
      throw DescentViolation("objective increased at iteration " + std::to_string(k));
    previous = value;
  };

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double value = problem.smooth.evaluate(u, grad);
    check_value(k, value);
    if (!all_finite(grad)) throw SolverDiverged(k, u);
    if (k % config.record_every == 0) report(k, value);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= result.step * grad[i];
    project_feasible(u, problem.support);
  }
  const double final_value = problem.smooth.evaluate(u, {});
  check_value(config.max_iters, final_value);
  report(config.max_iters, final_value);

  if (problem.flatfield) result.flatfield = problem.flatfield(u);
  result.image = std::move(u);
  return result;
}

SolveResult warm_start_chain(std::span<const Stage> stages, std::vector<double> initial,
                             const IterateCallback& callback) {
  if (stages.empty()) throw InvalidArgument("warm-start chain needs at least one stage");
  SolveResult combined;
  std::size_t offset = 0;
  std::vector<double> current = std::move(initial);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    IterateCallback shifted;
    if (callback)
      shifted = [&, s](std::size_t k, std::span<const double> u, const FlatFieldEstimate* est) {
        if (s > 0 && k == 0) return;
        callback(offset + k, u, est);
      };
    SolveResult stage = prox_gradient(stages[s].problem, stages[s].config, std::move(current), shifted);
    for (const IterationRecord& rec : stage.history) {
      if (s > 0 && rec.iter == 0) continue;
      combined.history.push_back({offset + rec.iter, rec.objective});
    }
    offset += stage.iterations;
    current = std::move(stage.image);
    combined.flatfield = std::move(stage.flatfield);
    combined.lipschitz = stage.lipschitz;
    combined.step = stage.step;
  }
  combined.image = std::move(current);
  combined.iterations = offset;
  return combined;
}

} // namespace ringct
