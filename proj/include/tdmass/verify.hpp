#pragma once

// End-to-end numerical checks: the Gaussian propagator against brute-force
// grid evolution, the Fourier picture change, invariant conservation,
// split-step convergence and the number-basis operator identities.

#include <complex>
#include <vector>

#include "tdmass/fock.hpp"
#include "tdmass/profiles.hpp"
#include "tdmass/report.hpp"

namespace tdmass {

struct VerifyConfig {
  std::complex<double> alpha{1.0, 0.0};  // original-picture coherent amplitude
  int grid_n = 2048;
  double grid_l = 32.0;
  double dt = 1e-4;
  std::vector<double> times{0.5, 1.0, 2.0};
  double convergence_dt = 1e-3;  // compared with convergence_dt / 2
  int fock_dim = 64;
  bool dim_doubling = true;
  fock::ShearSign sign = fock::ShearSign::Appendix;
  std::vector<MassProfile> profiles{make_hyperbolic(1.0), make_quadratic(1.0)};
};

/// The (rho, rho') grid {0.5, 0.8, 1.25, 2} x {-1, -0.3, 0.3, 1}.
std::vector<std::pair<double, double>> operator_check_grid();

/// First time used for grid runs: 0.1 for the hyperbolic profile (u vanishes
/// at 0), otherwise the start of the profile's domain.
double grid_start(const MassProfile& profile);

/// Transformed-picture state at grid_start(profile): F^dagger |alpha>
/// carried from the domain start by the closed-form propagator.
GaussianStated transformed_initial(const MassProfile& profile, std::complex<double> alpha);

/// Fidelity of grid evolution against propagate() at each of cfg.times,
/// relative drift of <I> along the grid run, and absolute drift of <I> along
/// propagate().
std::vector<CheckResult> check_grid_against_propagator(const MassProfile& profile,
                                                       const VerifyConfig& cfg);

/// Fidelity of evolve_original(F Psi) against F evolve_transformed(Psi) at cfg.times.
std::vector<CheckResult> check_picture_equivalence(const MassProfile& profile,
                                                   const VerifyConfig& cfg);

/// Ratio of the grid-vs-analytic state error sqrt(1 - F) at convergence_dt
/// and convergence_dt / 2, evolved to the largest of cfg.times; passes when
/// the ratio is 4 +- 1.
CheckResult check_convergence(const MassProfile& profile, const VerifyConfig& cfg);

/// check_bch and check_invariant_similarity over operator_check_grid() at
/// fock_dim, plus (if dim_doubling) one stability result per identity
/// comparing against 2 * fock_dim.
std::vector<CheckResult> check_operator_identities(const VerifyConfig& cfg);

std::vector<CheckResult> run_verification(const VerifyConfig& cfg);

}  // namespace tdmass
