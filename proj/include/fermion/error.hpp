#pragma once

#include <stdexcept>
#include <string>

namespace fermion {

/// Argument outside the mathematical domain of an operation (poles, x <= 0, invalid parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation ran but could not meet its own consistency checks.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A semi-infinite region could not be truncated within the requested tail bound.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fermion
