#pragma once

#include <stdexcept>
#include <string>

namespace bkm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (unknown keys, bad descriptor names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (empty ball, y = 0 for the
/// reflection, ball not fitting the periodic box, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values encountered in an input or produced by an operation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A checker's hypothesis is violated by its input (e.g. divergence-free
/// field required).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Parameter out of the supported range (cost guards, exponent ranges).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A constructed object violates its own invariant.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Time stepping produced NaN/Inf; carries the last time with valid data.
class BlowUpSuspected : public Error {
 public:
  BlowUpSuspected(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace bkm
