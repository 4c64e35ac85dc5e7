#pragma once

#include <stdexcept>
#include <string>

namespace jscc {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The request or object itself is malformed: bad matrices, out-of-range
// parameters, mismatched kinds. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A well-posed computation failed to reach its tolerance or certificate.
// The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NonStochasticError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ReducibleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class PeriodicError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The pair chain's z-marginal depends on the conditioning x-coordinate, so
// the conditional-entropy machinery does not apply. Message carries a witness.
class HiddenMarginalError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class KindMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooLargeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A ratio bound was requested on the branch where the source variance term
// must be positive.
class DegenerateSourceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NegativeVarianceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class QuadratureFailureError : public NumericError {
 public:
  using NumericError::NumericError;
};

class OptimizationFailureError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InfeasiblePolytopeError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace jscc
