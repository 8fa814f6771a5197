#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace povmkit {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together (non-square input, mismatched dimensions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Result would exceed the supported Hilbert-space dimension.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An input violates a mathematical invariant of the type it is meant to be.
///
/// `invariant` names the violated property ("hermitian", "completeness", ...)
/// and `magnitude` carries the measured violation when one exists.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& what,
                  std::optional<double> magnitude = std::nullopt)
      : Error(what), invariant_(std::move(invariant)), magnitude_(magnitude) {}

  const std::string& invariant() const noexcept { return invariant_; }
  std::optional<double> magnitude() const noexcept { return magnitude_; }

 private:
  std::string invariant_;
  std::optional<double> magnitude_;
};

/// Joint construction requested for properties that do not coexist.
class CoexistenceError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an outcome whose probability is numerically zero.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency check failed (e.g. probabilities not summing to one).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace povmkit
