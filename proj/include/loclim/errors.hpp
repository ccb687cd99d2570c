#pragma once

#include <stdexcept>
#include <string>

namespace loclim {

// Invalid model or operation parameters (H outside (0,1), eps <= 0, ...).
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Array shapes that do not fit together (path dimension vs level point).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad or unknown configuration keys, degenerate experiment grids.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested work exceeds a configured cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Gram matrix could not be factorized even after jitter escalation.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or series did not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double residual)
      : std::runtime_error(what + " (achieved residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace loclim
