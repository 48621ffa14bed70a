#pragma once

#include <stdexcept>
#include <string>

namespace popchaos {

// Argument outside an operation's mathematical domain (k <= 0, x <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Noise variance too large for an equilibrium to exist. Carries the maximal
// feasible variance for the requested shape parameter.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double bound)
      : std::runtime_error(what), bound_(bound) {}

  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

// Numerical failure: overflow, no root in the scanned range, orbit escape.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace popchaos
