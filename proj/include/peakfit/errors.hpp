#pragma once

#include <stdexcept>
#include <string>

namespace peakfit {

// Invalid configuration or arguments, detected before any sampling happens.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures during an estimation run.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Numerically rank-deficient system; usually signals a degenerate design
// or a bandwidth that is too small.
class RankError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// A zoom cube has collapsed below floating-point resolution.
class PrecisionError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace peakfit
