#pragma once

// Brute-force position-grid Schroedinger propagation, independent of the
// Ermakov machinery. Grid: q_j = -L/2 + j L/N, periodic spectral derivatives.

#include <complex>
#include <iosfwd>

#include <Eigen/Core>

#include "tdmass/gaussian.hpp"
#include "tdmass/profiles.hpp"

namespace tdmass {

struct GridWavefunction {
  int n = 0;
  double extent = 0.0;
  Eigen::VectorXcd psi;

  double dq() const { return extent / n; }
  double q(Eigen::Index j) const { return -0.5 * extent + static_cast<double>(j) * dq(); }
  /// Angular wavenumber of FFT bin j.
  double k(Eigen::Index j) const;
  double norm() const;
};

struct GridMoments {
  double mean_q;
  double mean_p;
  double var_q;
  double var_p;
  double cov_qp;
};

struct SplitStepOptions {
  double boundary_tolerance = 1e-8;
  int check_every = 200;
};

/// Largest |psi| on the two outermost cells.
double edge_amplitude(const GridWavefunction& psi);

/// Box size needed so that the Gaussian's amplitude at +-L/2 stays below tolerance.
double required_extent(const GaussianStated& state, double tolerance = 1e-8);

/// Pure Gaussian with the given moments, zero phase at the mean, normalized on
/// the grid. Throws ResolutionError if the tails reach the box edge.
GridWavefunction sample_gaussian(const GaussianStated& state, int n, double extent,
                                 double tolerance = 1e-8);

/// Strang splitting for i dPsi/dtau = 1/2 [p^2 + q^2/(kappa M(tau))] Psi:
/// half potential, full kinetic, half potential, with the time-dependent
/// coefficient taken at the step midpoint.
GridWavefunction evolve_transformed(const GridWavefunction& psi, const MassProfile& profile,
                                    double tau_start, double tau_end, double dt,
                                    const SplitStepOptions& opt = {});

/// Same scheme for the untransformed oscillator in rescaled time,
/// i dpsi/dtau = 1/2 [p^2/(kappa M(tau)) + q^2] psi.
GridWavefunction evolve_original(const GridWavefunction& psi, const MassProfile& profile,
                                 double tau_start, double tau_end, double dt,
                                 const SplitStepOptions& opt = {});

/// Fourier operator exp(-i pi/4 (p^2 + q^2)) e^{i pi/4}, i.e. the unitary
/// continuous Fourier transform, evaluated on the same grid by direct
/// trapezoidal quadrature. Inverse applies the adjoint.
GridWavefunction apply_fourier_grid(const GridWavefunction& psi, FourierDirection dir);

GridMoments observables(const GridWavefunction& psi);
GaussianStated to_gaussian(const GridMoments& m);
double invariant_expectation(const GridWavefunction& psi, double rho, double rho_dot);

/// |<psi1|psi2>|^2 / (|psi1|^2 |psi2|^2). Throws ShapeError on grid mismatch.
double fidelity(const GridWavefunction& a, const GridWavefunction& b);

/// sqrt(1 - fidelity), computed as the norm of the component of b/|b|
/// orthogonal to a/|a| so that it stays accurate when fidelity is near 1.
double trace_distance(const GridWavefunction& a, const GridWavefunction& b);

/// CSV with header q,re_psi,im_psi,abs2.
void write_snapshot_csv(std::ostream& os, const GridWavefunction& psi);

}  // namespace tdmass
