#pragma once

#include <stdexcept>
#include <string>

namespace ensemblefolio {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument shape (dimension mismatch, bad fraction, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violates the model (non-positive price, malformed row, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Not enough history to evaluate an estimator or a return.
class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

/// Covariance estimate is not positive semidefinite within tolerance.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

/// Requested grid or allocation is larger than the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Partition of component indices into base sets is invalid.
class PartitionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Mixture support is empty.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace ensemblefolio
