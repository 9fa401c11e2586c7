#pragma once

#include <stdexcept>
#include <string>

namespace pfol {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a precondition (dimension mismatch, infeasible start, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The domain lacks an optional capability (projection, feasibility checker).
class CapabilityMissing : public Error {
 public:
  using Error::Error;
};

/// An iterative inner solver did not reach its tolerance.
class OracleConvergenceError : public Error {
 public:
  OracleConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A proven iteration bound was exceeded; usually means a broken LO oracle.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A loss stream produced values outside [0, 1].
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pfol
