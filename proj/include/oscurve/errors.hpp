#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace oscurve {

/// Base of every error raised by the library. `operation()` names the
/// module operation that failed, e.g. "level_set_cover::build_cover".
class Error : public std::runtime_error {
 public:
  Error(std::string operation, const std::string& message)
      : std::runtime_error(operation + ": " + message),
        operation_(std::move(operation)) {}

  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string operation_;
};

/// Argument outside the mathematical domain of an operation (t <= 0, t outside
/// the curve interval, empty offspring interval).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold (beta <= alpha, p < 1, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The result is undefined for this input (zero amplitude, v(h) = 0,
/// zero torsion under a non-positive weight exponent).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Sampling could not resolve the function: too many nodes, or a band jump
/// that survives refinement. Carries the offending subinterval.
class ResolutionError : public Error {
 public:
  ResolutionError(std::string operation, const std::string& message,
                  double lo, double hi)
      : Error(std::move(operation),
              message + " on [" + std::to_string(lo) + ", " +
                  std::to_string(hi) + "]"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Quadrature tolerance not reached within the evaluation budget.
class BudgetError : public Error {
 public:
  BudgetError(std::string operation, const std::string& message,
              double best_real, double best_imag, double error_bound)
      : Error(std::move(operation), message),
        best_real_(best_real),
        best_imag_(best_imag),
        error_bound_(error_bound) {}

  double best_real() const noexcept { return best_real_; }
  double best_imag() const noexcept { return best_imag_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_real_;
  double best_imag_;
  double error_bound_;
};

}  // namespace oscurve
