#pragma once

#include <stdexcept>
#include <string>

namespace fqrp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fixed-point or Newton solve hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Grid too coarse for the requested number of coefficients.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Non-uniform grid or a time that does not sit on the grid.
class GridError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Two paths that cannot be compared (grid or dimension mismatch).
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

/// Problem size beyond what an exact O(n^2) routine accepts.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// ODE/SDE state became non-finite.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time)
      : Error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fqrp
