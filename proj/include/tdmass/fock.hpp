#pragma once

// Truncated number-basis operator algebra used to check the operator
// identities behind the propagator (BCH factorization of the Ermakov
// unitary, T I T^dagger = H0, Fourier-operator convention) element by element.
//
// Quadratic exponentials spread number states far beyond their index: a
// squeeze of ln 2 pushes |48> well past |200>. Every check therefore builds
// its exponentials in a padded working basis (dim * padding states) and only
// compares the leading (dim - guard) block.

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "tdmass/gaussian.hpp"
#include "tdmass/report.hpp"

namespace tdmass::fock {

using Operator = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct Quadratures {
  Operator q;
  Operator p;
  Operator a;
  Operator a_dag;
};

/// a|n> = sqrt(n)|n-1>, q = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)).
Quadratures build_quadratures(int dim);

/// General matrix exponential (Pade scaling and squaring). Throws
/// std::overflow_error if the result is not finite.
Operator matrix_exp(const Operator& m);

/// Eigendecomposition of a Hermitian matrix, split into even and odd number
/// sectors when the matrix does not couple them (true for every quadratic
/// generator used here), for cheap evaluation of exp(i t H).
class HermitianSpectrum {
 public:
  explicit HermitianSpectrum(const Operator& h);

  Eigen::Index size() const { return values_.size(); }
  bool parity_split() const { return split_; }

  /// Leading rows x cols block of exp(i t H).
  Operator exp_block(double t, Eigen::Index rows, Eigen::Index cols) const;
  /// Full exp(i t H).
  Operator exp(double t) const { return exp_block(t, size(), size()); }
  /// m * exp(i t H) for m with size() columns.
  Operator right_multiply(const Operator& m, double t) const;
  Vector apply(double t, const Vector& v) const;

 private:
  Eigen::VectorXd values_;
  Operator vectors_;
  bool split_ = false;
};

/// exp(i t H) for Hermitian H.
Operator expi_hermitian(const Operator& h, double t);

/// Truncated coherent state e^{-|a|^2/2} sum a^n/sqrt(n!) |n>, renormalized.
/// Requires |alpha|^2 < dim/4.
Vector coherent_vector(std::complex<double> alpha, int dim);

/// Quadrature mean and symmetrized covariance of a number-basis vector.
GaussianStated moments(const Vector& v, const Quadratures& ops);

/// Sign of the q^2 coefficient inside the single-exponential Ermakov unitary
/// exp(i ln(rho)/2 (qp + pq + c q^2)). Appendix: c = 2 rho rho'/(1 - rho^2),
/// which is correct. MainText: c = 2 rho rho'/(rho^2 - 1), kept for mutation checks.
enum class ShearSign { Appendix, MainText };

struct CheckOptions {
  int dim = 64;
  int padding = 8;
  int guard = 16;
  ShearSign sign = ShearSign::Appendix;
  double bch_tolerance = 1e-6;
  double similarity_tolerance = 1e-8;

  int working_dim() const { return dim * padding; }
  int trusted_block() const { return dim - guard; }
};

/// Padded operators and the spectra shared by every check at one size.
class Workspace {
 public:
  explicit Workspace(const CheckOptions& opt);

  const CheckOptions& options() const { return opt_; }
  const Quadratures& ops() const { return ops_; }
  const Operator& q_squared() const { return q2_; }
  const Operator& p_squared() const { return p2_; }
  /// qp + pq
  const Operator& dilation_generator() const { return g_; }
  const HermitianSpectrum& q_squared_spectrum() const { return q2_spec_; }
  const HermitianSpectrum& dilation_spectrum() const { return g_spec_; }

  /// Leading rows of T = exp(i ln(rho)/2 (qp + pq)) exp(-i rho'/(2 rho) q^2).
  Operator t_rows(double rho, double rho_dot, Eigen::Index rows) const;

 private:
  CheckOptions opt_;
  Quadratures ops_;
  Operator q2_, p2_, g_;
  HermitianSpectrum q2_spec_, g_spec_;
};

/// Max |exp(A + B) - exp(A) exp(-i rho'/(2 rho) q^2)| on the trusted block.
CheckResult check_bch(double rho, double rho_dot, const Workspace& ws);
CheckResult check_bch(double rho, double rho_dot, const CheckOptions& opt = {});

/// Max |T I T^dagger - (p^2 + q^2)/2| on the trusted block.
CheckResult check_invariant_similarity(double rho, double rho_dot, const Workspace& ws);
CheckResult check_invariant_similarity(double rho, double rho_dot, const CheckOptions& opt = {});

struct ConventionProbe {
  std::complex<double> alpha;
  double overlap_minus_i;  // |<-i alpha| F |alpha>|^2
  double overlap_plus_i;   // |<+i alpha| F |alpha>|^2
};

struct FourierConventionReport {
  /// -1 if F|alpha> = |-i alpha>, +1 if F|alpha> = |i alpha>, 0 if undecided.
  int sign = 0;
  double vacuum_overlap = 0.0;
  double parity_overlap = 0.0;  // |<-alpha| F^2 |alpha>|^2 at alpha = 1
  std::vector<ConventionProbe> probes;
};

/// Applies exp(-i pi/4 (p^2 + q^2)) e^{i pi/4} to coherent vectors with
/// alpha in {1, i, 1+i} and reports which way it rotates them.
FourierConventionReport fourier_convention(int dim = 64);

}  // namespace tdmass::fock
