#pragma once

// Pure Gaussian states in the (q, p) quadrature representation (hbar = 1,
// a = (q + i p)/sqrt(2)) and the symplectic maps generated by the quadratic
// unitaries of the invariant-based propagator.
//
// Conventions, each pinned against the number-basis oracle (see fock.hpp):
//   exp(i c q^2)                       -> (q, p) -> (q, p + 2 c q)
//   exp(-i (s/2)(qp + pq))             -> (q, p) -> (e^s q, e^-s p)
//   exp(-i Theta (p^2 + q^2)/2)        -> (q, p) -> (q cos + p sin, -q sin + p cos)
//   Fourier operator F                 -> (q, p) -> (p, -q),  F|alpha> = |-i alpha>

#include <cmath>
#include <complex>
#include <iosfwd>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tdmass/ermakov.hpp"
#include "tdmass/profiles.hpp"

namespace tdmass {

template <typename Scalar>
struct GaussianState {
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
  using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

  Vector2 mean = Vector2::Zero();
  Matrix2 cov = Matrix2::Identity() / Scalar(2);

  Scalar var_q() const { return cov(0, 0); }
  Scalar var_p() const { return cov(1, 1); }
  Scalar cov_qp() const { return cov(0, 1); }
};

using GaussianStated = GaussianState<double>;

template <typename Scalar>
struct SqueezeParams {
  Scalar r;
  Scalar phi;
};

enum class FourierDirection { Forward, Inverse };

template <typename Scalar>
GaussianState<Scalar> make_coherent(const std::complex<Scalar>& alpha) {
  GaussianState<Scalar> s;
  s.mean << std::sqrt(Scalar(2)) * alpha.real(), std::sqrt(Scalar(2)) * alpha.imag();
  return s;
}

/// mean -> M mean, cov -> M cov M^T.
template <typename Scalar, typename Derived>
GaussianState<Scalar> apply_symplectic(const GaussianState<Scalar>& s,
                                       const Eigen::MatrixBase<Derived>& m) {
  GaussianState<Scalar> out;
  out.mean = m * s.mean;
  out.cov = m * s.cov * m.transpose();
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> shear_matrix(Scalar c) {
  Eigen::Matrix<Scalar, 2, 2> m;
  m << Scalar(1), Scalar(0), Scalar(2) * c, Scalar(1);
  return m;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> dilation_matrix(Scalar s) {
  return Eigen::Matrix<Scalar, 2, 1>(std::exp(s), std::exp(-s)).asDiagonal();
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation_matrix(Scalar theta) {
  const Scalar c = std::cos(theta);
  const Scalar sn = std::sin(theta);
  Eigen::Matrix<Scalar, 2, 2> m;
  m << c, sn, -sn, c;
  return m;
}

/// Ermakov map T^dagger = exp(i rho'/(2 rho) q^2) exp(-i ln(rho)/2 (qp + pq)):
/// dilation by ln(rho) followed by a shear of strength rho'/(2 rho).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> t_dagger_matrix(Scalar rho, Scalar rho_dot) {
  return shear_matrix(rho_dot / (Scalar(2) * rho)) * dilation_matrix(std::log(rho));
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> t_matrix(Scalar rho, Scalar rho_dot) {
  return dilation_matrix(-std::log(rho)) * shear_matrix(-rho_dot / (Scalar(2) * rho));
}

template <typename Scalar>
GaussianState<Scalar> apply_shear(const GaussianState<Scalar>& s, Scalar c) {
  return apply_symplectic(s, shear_matrix(c));
}

template <typename Scalar>
GaussianState<Scalar> apply_dilation(const GaussianState<Scalar>& s, Scalar log_scale) {
  return apply_symplectic(s, dilation_matrix(log_scale));
}

template <typename Scalar>
GaussianState<Scalar> apply_rotation(const GaussianState<Scalar>& s, Scalar theta) {
  return apply_symplectic(s, rotation_matrix(theta));
}

template <typename Scalar>
GaussianState<Scalar> fourier_map(const GaussianState<Scalar>& s, FourierDirection dir) {
  // Quarter turn written with exact entries rather than cos(pi/2).
  Eigen::Matrix<Scalar, 2, 2> m;
  if (dir == FourierDirection::Forward) {
    m << Scalar(0), Scalar(1), Scalar(-1), Scalar(0);
  } else {
    m << Scalar(0), Scalar(-1), Scalar(1), Scalar(0);
  }
  return apply_symplectic(s, m);
}

template <typename Scalar>
GaussianState<Scalar> apply_T_dagger(const GaussianState<Scalar>& s, Scalar rho, Scalar rho_dot) {
  return apply_shear(apply_dilation(s, std::log(rho)), rho_dot / (Scalar(2) * rho));
}

template <typename Scalar>
GaussianState<Scalar> apply_T(const GaussianState<Scalar>& s, Scalar rho, Scalar rho_dot) {
  return apply_dilation(apply_shear(s, -rho_dot / (Scalar(2) * rho)), -std::log(rho));
}

/// Coherent state of the invariant with parameters (rho, rho'): T^dagger |alpha>.
template <typename Scalar>
GaussianState<Scalar> invariant_coherent_state(const std::complex<Scalar>& alpha, Scalar rho,
                                               Scalar rho_dot) {
  return apply_T_dagger(make_coherent(alpha), rho, rho_dot);
}

/// <I> for I = 1/2 [q^2/rho^2 + (rho p - rho' q)^2].
template <typename Scalar>
Scalar invariant_expectation(const GaussianState<Scalar>& s, Scalar rho, Scalar rho_dot) {
  const Scalar qq = s.cov(0, 0) + s.mean[0] * s.mean[0];
  const Scalar pp = s.cov(1, 1) + s.mean[1] * s.mean[1];
  const Scalar qp = s.cov(0, 1) + s.mean[0] * s.mean[1];
  return Scalar(0.5) * (qq / (rho * rho) + rho * rho * pp - Scalar(2) * rho * rho_dot * qp +
                        rho_dot * rho_dot * qq);
}

template <typename Scalar>
Scalar uncertainty_product(const GaussianState<Scalar>& s) {
  return std::sqrt(s.cov(0, 0) * s.cov(1, 1));
}

/// det(cov) - 1/4; zero for pure states.
template <typename Scalar>
Scalar purity_defect(const GaussianState<Scalar>& s) {
  return s.cov.determinant() - Scalar(0.25);
}

/// r = ln(2 lambda_max)/2 and the angle in [0, pi) of the major axis of cov.
template <typename Scalar>
SqueezeParams<Scalar> squeeze_params(const GaussianState<Scalar>& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> es(s.cov);
  const Scalar lmin = es.eigenvalues()[0];
  const Scalar lmax = es.eigenvalues()[1];
  const Scalar r = Scalar(0.5) * std::log(Scalar(2) * lmax);
  if (lmax - lmin <= Scalar(1e-12) * lmax) return {r, Scalar(0)};
  const auto axis = es.eigenvectors().col(1);
  Scalar phi = std::atan2(axis[1], axis[0]);
  if (phi < Scalar(0)) phi += std::numbers::pi_v<Scalar>;
  if (phi >= std::numbers::pi_v<Scalar>) phi -= std::numbers::pi_v<Scalar>;
  return {r, phi};
}

struct PropagationReport {
  double tau;
  GaussianStated state;
  double var_q;
  double var_p;
  double uncertainty;
  double invariant;
  double r;
  double phi;
};

/// Phase-space matrix of T^dagger(tau) R(Theta(tau)) T(tau_0), tau_0 = ermakov.tau[0].
Eigen::Matrix2d propagator_matrix(const ErmakovSolution& ermakov, double tau);

/// Evolves `initial`, given at ermakov.tau[0], to tau in the transformed
/// picture and fills in the observables.
PropagationReport propagate(const MassProfile& profile, const ErmakovSolution& ermakov, double tau,
                            const GaussianStated& initial);

PropagationReport make_report(double tau, const GaussianStated& state, double rho, double rho_dot);

/// CSV with header tau,mean_q,mean_p,var_q,var_p,cov_qp,uncertainty,invariant,r,phi.
void write_csv(std::ostream& os, const std::vector<PropagationReport>& series);

}  // namespace tdmass
