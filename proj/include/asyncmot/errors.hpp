#pragma once

#include <stdexcept>
#include <string>

namespace asyncmot {

/// Input data violates a type invariant or a file is malformed.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frames were submitted out of timestamp order.
class OrderingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A filter or solver reached a numerically invalid state (e.g. non-PSD covariance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace asyncmot
