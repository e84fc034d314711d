#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ringct {

/// Raised for malformed arguments (bad dimensions, negative means, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A reconstruction model cannot be formed from the given data, e.g. a
/// nonpositive log-coefficient c_i in the joint model. Carries the offending
/// detector indices.
class ModelDegenerate : public std::runtime_error {
public:
  ModelDegenerate(const std::string& what, std::vector<std::size_t> detectors)
      : std::runtime_error(what), detectors_(std::move(detectors)) {}

  const std::vector<std::size_t>& detectors() const noexcept { return detectors_; }

private:
  std::vector<std::size_t> detectors_;
};

/// Zero (or negative) counts where a logarithm of the data is required.
class PositivityViolation : public std::runtime_error {
public:
  struct Cell {
    std::size_t detector;
    std::size_t projection;
  };

  PositivityViolation(const std::string& what, std::vector<Cell> cells)
      : std::runtime_error(what), cells_(std::move(cells)) {}

  const std::vector<Cell>& cells() const noexcept { return cells_; }

private:
  std::vector<Cell> cells_;
};

/// Input for which a quantity is mathematically undefined (e.g. t0 = 0 in the
/// ring-profile extrema).
class DegenerateInput : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace ringct
