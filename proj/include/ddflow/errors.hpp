#pragma once

#include <stdexcept>
#include <string>

namespace ddflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition failure on caller-supplied data (dimensions, counts, ranges).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A coefficient violates one of the structural assumptions (positivity,
/// definiteness, Lipschitz bounds).
class ModelViolation : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double achieved_residual)
      : Error(what), residual_(achieved_residual) {}
  double achieved_residual() const { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ddflow
