#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kcq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, negative rate, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed: singular input, non-convergence, step underflow.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Matrix logarithm has no unambiguous principal branch for this input.
class AmbiguousLog : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// Nonlinear least-squares fit did not converge; carries the final residuals.
class FitFailure : public NumericFailure {
 public:
  FitFailure(const std::string& what, std::vector<double> residuals)
      : NumericFailure(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace kcq
