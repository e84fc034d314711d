#pragma once

#include <vector>

namespace ringct {

/// Closed-form flat-field estimate v_hat(u) = c / d(u) and its split into a
/// convex combination of the flats ML estimate, the measurement-based
/// estimate v_y(u) and the prior mode:
///   v_hat = theta1 * v_f + theta2 * v_y(u) + theta3 * v_prior.
struct FlatFieldEstimate {
  std::vector<double> v_hat;
  std::vector<double> theta1;
  std::vector<double> theta2;
  std::vector<double> theta3;
  std::vector<double> v_y;     // sum_j y_ij / tau_i(u)
  std::vector<double> v_prior; // (alpha - 1) / beta, 0 where beta == 0
};

} // namespace ringct
