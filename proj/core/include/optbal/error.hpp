#pragma once

#include <stdexcept>
#include <string>

namespace optbal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions, invalid parameters, malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (theta outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A function evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds an implemented limit (derivative order, jet depth).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Step budget exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The integrated state left the finite range.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A boundary value solver did not converge.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const noexcept { return best_residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

}  // namespace optbal
