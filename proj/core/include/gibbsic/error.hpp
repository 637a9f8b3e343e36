#pragma once

#include <stdexcept>
#include <string>

namespace gibbsic {

/// Bad input: violated precondition, malformed configuration, dimension mismatch.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was given valid input but could not complete
/// (indefinite factorization, non-finite gradient, solver non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point iteration ran out of iterations; carries the last residual.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : NumericalError(what), residual_(last_residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}
}  // namespace detail

}  // namespace gibbsic
