#pragma once

#include <stdexcept>
#include <string>

namespace bandspectra {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition on an argument's value or shape was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A size exceeded a configured enumeration or evaluation cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, long long value, long long cap)
      : Error(what + ": " + std::to_string(value) + " exceeds cap " + std::to_string(cap)),
        value_(value),
        cap_(cap) {}

  long long value() const noexcept { return value_; }
  long long cap() const noexcept { return cap_; }

 private:
  long long value_;
  long long cap_;
};

/// Model or experiment configuration is unusable (missing cumulant order, bad JSON, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested estimator.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed to converge.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace bandspectra
