#pragma once

#include <stdexcept>
#include <string>

namespace tdmass {

/// Argument outside the domain of a profile or operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive integration could not make progress (step size underflow).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double tau)
      : std::runtime_error(what + " (tau = " + std::to_string(tau) + ")"), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// A quantity that must stay away from zero reached it (u = 0 in 1/u^2, rho -> 0).
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, double tau)
      : std::runtime_error(what + " (tau = " + std::to_string(tau) + ")"), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// A grid wavefunction touched the edge of its box.
class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(const std::string& what, double tau)
      : std::runtime_error(what + " (tau = " + std::to_string(tau) + ")"), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// Operands defined on incompatible grids or bases.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tdmass
