#pragma once

#include <stdexcept>
#include <string>

namespace cohcost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, non-Hermitian, non-unitary, bad dimensions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Input expected to be positive semidefinite has an eigenvalue below the
/// clamping window.
class NotPsdError : public ValidationError {
 public:
  NotPsdError(const std::string& what, double eigenvalue)
      : ValidationError(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const noexcept { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Jacobi sweeps exhausted before the off-diagonal mass dropped below tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double off_diagonal_norm)
      : Error(what), off_diagonal_norm_(off_diagonal_norm) {}
  double off_diagonal_norm() const noexcept { return off_diagonal_norm_; }

 private:
  double off_diagonal_norm_;
};

/// Spectrum gaps that cannot be placed on a common lattice.
class IncommensurateError : public Error {
 public:
  IncommensurateError(const std::string& what, double ratio)
      : Error(what), ratio_(ratio) {}
  double ratio() const noexcept { return ratio_; }

 private:
  double ratio_;
};

/// A bound was requested outside the parameter range where it is guaranteed.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace cohcost
