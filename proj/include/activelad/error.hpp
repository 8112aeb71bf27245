#pragma once

#include <stdexcept>
#include <string>

namespace activelad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree, or an argument is out of its domain.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A factorization met a pivot below its tolerance.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed input data (files, specs).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace activelad
