#pragma once

// Auxiliary functions of the Ermakov-Lewis construction for the transformed
// oscillator  i dPsi/dtau = 1/2 [p^2 + q^2/(kappa M(tau))] Psi:
//
//   u'' + u/(kappa M) = 0,          rho = |u| sqrt(1 + S^2),  S' = 1/u^2,
//   rho'' + rho/(kappa M) = rho^-3, Theta' = 1/rho^2.

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "tdmass/ode.hpp"
#include "tdmass/profiles.hpp"

namespace tdmass {

enum class ErmakovSource { ClosedForm, FromU, DirectODE };

/// rho, rho', Theta sampled on a strictly increasing grid, with Theta
/// measured from the first sample (theta[0] == 0). kappa_m is the profile
/// value at each sample; it fixes rho'' through the Ermakov equation.
struct ErmakovSolution {
  Eigen::VectorXd tau;
  Eigen::VectorXd rho;
  Eigen::VectorXd rho_dot;
  Eigen::VectorXd theta;
  Eigen::VectorXd kappa_m;
  ErmakovSource source = ErmakovSource::ClosedForm;

  Eigen::Index size() const { return tau.size(); }
};

struct USamples {
  Eigen::VectorXd tau;
  Eigen::VectorXd u;
  Eigen::VectorXd u_dot;
};

/// Values of an Ermakov solution at one instant.
struct ErmakovPoint {
  double tau;
  double rho;
  double rho_dot;
  double theta;
};

struct CriticalPoint {
  double tau;
  double rho;
  bool minimum;
};

/// Integrates u'' + u/(kappa M) = 0 from (tau0, u0, u_dot0); grid[0] must equal tau0.
USamples solve_u(const MassProfile& profile, double tau0, double u0, double u_dot0,
                 const Eigen::VectorXd& grid, const OdeOptions& opt = {});

/// Builds rho from sampled u via S = s0 + int 1/u^2. u must keep one sign on
/// the whole grid (SingularityError otherwise).
ErmakovSolution rho_from_u(const MassProfile& profile, const USamples& u, double s0);

/// Integrates the nonlinear Ermakov equation together with Theta' = 1/rho^2.
ErmakovSolution solve_ermakov_direct(const MassProfile& profile, double tau0, double rho0,
                                     double rho_dot0, const Eigen::VectorXd& grid,
                                     const OdeOptions& opt = {});

/// Samples the closed forms (analytic profiles only).
ErmakovSolution closed_form_solution(const MassProfile& profile, const Eigen::VectorXd& grid);

/// Closed form when the profile has one; otherwise the direct integration
/// started from the instantaneous equilibrium rho = (kappa M)^(1/4), rho' = 0.
ErmakovSolution reference_solution(const MassProfile& profile, const Eigen::VectorXd& grid,
                                   const OdeOptions& opt = {});

/// max |rho'' + rho/(kappa M) - rho^-3| over samples 2..n-3, with rho'' from a
/// five-point (fourth-order) finite-difference stencil.
double ermakov_residual(const ErmakovSolution& solution, const MassProfile& profile);

/// Isolated sign changes of rho', refined by bisection on the Hermite
/// interpolant. Identically vanishing rho' (equilibrium) yields nothing.
std::vector<CriticalPoint> find_critical_points(const ErmakovSolution& solution);

/// Piecewise cubic Hermite interpolation of rho, rho' and Theta, exact at the
/// samples. Throws DomainError outside [tau.front(), tau.back()].
ErmakovPoint sample_at(const ErmakovSolution& solution, double tau);

/// CSV with header tau,rho,rho_dot,theta,kappa_m and 17 significant digits.
void write_csv(std::ostream& os, const ErmakovSolution& solution);

}  // namespace tdmass
