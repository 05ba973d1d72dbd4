#pragma once

#include <stdexcept>
#include <string>

namespace indefbif {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A structural property that must hold (monotonicity, orderings,
/// stitching) was found violated by the computation.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A grid or sampling was too coarse to resolve the requested quantity.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A root search was started without a sign change.
class NotBracketedError : public Error {
 public:
  using Error::Error;
};

/// The flow leaves the positive region (or the time span) before the
/// requested event.
class NotReachableError : public Error {
 public:
  using Error::Error;
};

/// The adaptive integrator exhausted its step budget.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace indefbif
