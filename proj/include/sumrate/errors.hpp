#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sumrate {

// Base of everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (negative entries,
// wrong shapes, non-positive gains, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested object does not exist for this input: an SIR vector outside
// the achievable region, a weight vector violating the majorization
// condition, and so on.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double measured = 0.0,
                  std::ptrdiff_t index = -1)
      : Error(what), measured_(measured), index_(index) {}

  double measured() const { return measured_; }
  // Offending coordinate, or -1 when not tied to one.
  std::ptrdiff_t index() const { return index_; }

 private:
  double measured_;
  std::ptrdiff_t index_;
};

// An iterative method ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  long iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  long iterations_;
  double residual_;
};

// A documented precondition on a computed quantity failed (for example an
// anchor that is not on the unit spectral-radius level set).
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, double measured)
      : Error(what), measured_(measured) {}

  double measured() const { return measured_; }

 private:
  double measured_;
};

}  // namespace sumrate
