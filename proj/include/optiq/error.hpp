#pragma once

#include <stdexcept>
#include <string>

namespace optiq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or contract of an operation was violated by its inputs.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap. Carries the best residual reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double attained_residual)
      : Error(what), residual_(attained_residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace optiq
