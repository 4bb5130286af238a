#pragma once

#include <stdexcept>
#include <string>

namespace enerkin {

// Base of every fault raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Violated precondition or invalid configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

// Infeasible transition requested (energy would go negative, no support).
class InfeasibleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "infeasible"; }
};

// Numerical breakdown: NaN, blow-up, negative mass beyond the clip budget.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace enerkin
