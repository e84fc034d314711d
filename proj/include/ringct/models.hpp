#pragma once

#include "ringct/objectives.hpp"
#include "ringct/priors.hpp"
#include "ringct/solver.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ringct {

/// One reconstruction model: data term, flat-field prior and TV weight.
struct ModelSpec {
  std::string name;
  ObjectiveKind kind = ObjectiveKind::amap;
  FlatPriorStrategy strategy;  // jmap and swls; others report v_hat with alpha = 1, beta = 0
  double lambda = 0.0;         // wlsz
  TvConfig tv;
  bool pseudo_count = false;   // add 1/2 to every count before log-based models
};

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& name);

struct ScanData {
  Sinogram counts;
  Sinogram flats;
  std::vector<double> v_true; // required by the baseline model only
};

/// ||A||^2 by power iteration with the library's fixed seed and count.
double default_norm_squared(const Projector& A);

/// Shared per-scan quantities reused across models.
class ScanContext {
public:
  ScanContext(std::shared_ptr<const Projector> projector, ScanData data);

  const Projector& projector() const { return *projector_; }
  std::shared_ptr<const Projector> projector_ptr() const { return projector_; }
  const ScanData& data() const { return data_; }
  const std::vector<double>& v_f() const { return v_f_; }
  /// ||A||^2, computed on first use.
  double norm_squared() const;
  /// Seeds the cached ||A||^2, e.g. when several scans share one projector.
  void set_norm_squared(double value) { norm_sq_ = value; }

private:
  std::shared_ptr<const Projector> projector_;
  ScanData data_;
  std::vector<double> v_f_;
  mutable std::optional<double> norm_sq_;
};

/// Problem for prox_gradient with TV folded into the smooth part
/// (L = L_data + gamma 8 / delta) and the flat-field estimator attached.
Problem build_problem(const ModelSpec& spec, const ScanContext& ctx,
                      std::vector<std::uint8_t> support = {});

/// FBP of log(v_f / y) clipped to the support and the nonnegative orthant.
/// Zero counts are replaced by 1/2 for this estimate only.
std::vector<double> fbp_initial_image(const ScanContext& ctx, const std::vector<std::uint8_t>& support);

} // namespace ringct
