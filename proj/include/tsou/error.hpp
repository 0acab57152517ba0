#pragma once

#include <stdexcept>
#include <string>

namespace tsou {

// Invalid parameters or inputs outside a function's domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// The compound-Poisson split is unavailable because K is infinite.
struct InfiniteKError : DomainError {
  using DomainError::DomainError;
};

// Parameter regime whose CF is available but which has no sampler here (alpha >= 1).
struct UnsupportedRegime : DomainError {
  using DomainError::DomainError;
};

// Quadrature failed, an iteration cap was hit, or a result is not finite.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An acceptance ratio fell outside [0, 1]; this points at a bad envelope.
struct EnvelopeViolation : NumericError {
  using NumericError::NumericError;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tsou
