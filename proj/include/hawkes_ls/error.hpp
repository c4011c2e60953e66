#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_ls {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The branching bound matrix has spectral radius >= 1.
class Unstable : public Error {
 public:
  explicit Unstable(double rho)
      : Error("Unstable: spectral radius " + std::to_string(rho) + " >= 1"), rho_(rho) {}
  double spectral_radius() const noexcept { return rho_; }

 private:
  double rho_;
};

class InvalidCurve : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

/// Structural problems with a model specification (dimensions, horizon, schema).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NotExponential : public Error {
 public:
  using Error::Error;
};

class RuntimeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class GridOutOfRange : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class CenteringUnavailable : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent event log (unsorted times, events outside (0, T], bad file).
class InvalidLog : public Error {
 public:
  using Error::Error;
};

}  // namespace hawkes_ls
