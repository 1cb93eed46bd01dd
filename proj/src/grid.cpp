#include "tdmass/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "tdmass/errors.hpp"

namespace tdmass {

namespace {

using cd = std::complex<double>;

void check_shape(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.n != b.n || a.extent != b.extent || a.psi.size() != b.psi.size()) {
    throw ShapeError("wavefunctions live on different grids");
  }
}

void check_boundary(const GridWavefunction& psi, double tau, double tolerance) {
  const double edge = edge_amplitude(psi) / std::sqrt(psi.norm());
  if (!(edge < tolerance)) {
    std::ostringstream msg;
    msg << "wavefunction reached the box edge (|psi| = " << std::scientific << edge << ")";
    throw ResolutionError(msg.str(), tau);
  }
}

int step_count(double span, double dt) {
  if (!(dt > 0.0) || dt > 1e-3) throw DomainError("split-step dt must lie in (0, 1e-3]");
  if (!(span >= 0.0)) throw DomainError("split-step end time precedes start time");
  return static_cast<int>(std::ceil(span / dt - 1e-9));
}

// One Strang propagation loop. half_potential(tau_mid) returns the half-step
// potential phase factors, kinetic(tau_mid) the full kinetic factors; either
// may return a reference to a cached array.
template <class Half, class Kin>
GridWavefunction strang(const GridWavefunction& in, double tau_start, double tau_end, double dt,
                        const SplitStepOptions& opt, Half&& half_potential, Kin&& kinetic) {
  const int steps = step_count(tau_end - tau_start, dt);
  GridWavefunction out = in;
  if (steps == 0) return out;
  const double h = (tau_end - tau_start) / steps;

  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum(in.n);
  for (int s = 0; s < steps; ++s) {
    const double mid = tau_start + (s + 0.5) * h;
    const Eigen::VectorXcd& v = half_potential(mid, h);
    out.psi.array() *= v.array();
    fft.fwd(spectrum, out.psi);
    spectrum.array() *= kinetic(mid, h).array();
    fft.inv(out.psi, spectrum);
    out.psi.array() *= v.array();
    if ((s + 1) % opt.check_every == 0) check_boundary(out, tau_start + (s + 1) * h, opt.boundary_tolerance);
  }
  check_boundary(out, tau_end, opt.boundary_tolerance);
  return out;
}

Eigen::VectorXd squared_positions(const GridWavefunction& psi) {
  Eigen::VectorXd q2(psi.n);
  for (int j = 0; j < psi.n; ++j) q2[j] = psi.q(j) * psi.q(j);
  return q2;
}

Eigen::VectorXd squared_wavenumbers(const GridWavefunction& psi) {
  Eigen::VectorXd k2(psi.n);
  for (int j = 0; j < psi.n; ++j) k2[j] = psi.k(j) * psi.k(j);
  return k2;
}

Eigen::VectorXcd phases(const Eigen::VectorXd& x, double factor) {
  return x.unaryExpr([factor](double v) { return std::polar(1.0, factor * v); });
}

}  // namespace

double GridWavefunction::k(Eigen::Index j) const {
  const Eigen::Index shifted = j < n / 2 ? j : j - n;
  return 2.0 * std::numbers::pi * static_cast<double>(shifted) / extent;
}

double GridWavefunction::norm() const { return psi.squaredNorm() * dq(); }

double edge_amplitude(const GridWavefunction& psi) {
  return std::max(std::abs(psi.psi[0]), std::abs(psi.psi[psi.n - 1]));
}

double required_extent(const GaussianStated& state, double tolerance) {
  const double var = state.var_q();
  const double peak = std::pow(2.0 * std::numbers::pi * var, -0.25);
  const double reach = peak > tolerance ? std::sqrt(4.0 * var * std::log(peak / tolerance)) : 0.0;
  return 2.0 * (std::abs(state.mean[0]) + reach);
}

GridWavefunction sample_gaussian(const GaussianStated& state, int n, double extent,
                                 double tolerance) {
  if (n < 8 || (n & (n - 1)) != 0) throw DomainError("grid size must be a power of two >= 8");
  if (!(extent > 0.0)) throw DomainError("grid extent must be positive");

  GridWavefunction out{n, extent, Eigen::VectorXcd(n)};
  const double var = state.var_q();
  const double chirp = state.cov_qp() / (2.0 * var);
  const cd width(1.0 / (4.0 * var), -chirp);
  for (int j = 0; j < n; ++j) {
    const double d = out.q(j) - state.mean[0];
    out.psi[j] = std::exp(-width * d * d + cd(0.0, state.mean[1] * d));
  }
  out.psi /= std::sqrt(out.norm());
  check_boundary(out, 0.0, tolerance);
  return out;
}

GridWavefunction evolve_transformed(const GridWavefunction& psi, const MassProfile& profile,
                                    double tau_start, double tau_end, double dt,
                                    const SplitStepOptions& opt) {
  check_domain(profile, tau_start);
  check_domain(profile, tau_end);
  const Eigen::VectorXd q2 = squared_positions(psi);
  const Eigen::VectorXd k2 = squared_wavenumbers(psi);
  Eigen::VectorXcd half(psi.n);
  Eigen::VectorXcd kin;
  double cached_h = -1.0;
  return strang(
      psi, tau_start, tau_end, dt, opt,
      [&](double mid, double h) -> const Eigen::VectorXcd& {
        half = phases(q2, -0.25 * omega_squared(profile, mid) * h);
        return half;
      },
      [&](double, double h) -> const Eigen::VectorXcd& {
        if (h != cached_h) {
          kin = phases(k2, -0.5 * h);
          cached_h = h;
        }
        return kin;
      });
}

GridWavefunction evolve_original(const GridWavefunction& psi, const MassProfile& profile,
                                 double tau_start, double tau_end, double dt,
                                 const SplitStepOptions& opt) {
  check_domain(profile, tau_start);
  check_domain(profile, tau_end);
  const Eigen::VectorXd q2 = squared_positions(psi);
  const Eigen::VectorXd k2 = squared_wavenumbers(psi);
  Eigen::VectorXcd half;
  Eigen::VectorXcd kin(psi.n);
  double cached_h = -1.0;
  return strang(
      psi, tau_start, tau_end, dt, opt,
      [&](double, double h) -> const Eigen::VectorXcd& {
        if (h != cached_h) {
          half = phases(q2, -0.25 * h);
          cached_h = h;
        }
        return half;
      },
      [&](double mid, double h) -> const Eigen::VectorXcd& {
        kin = phases(k2, -0.5 * h / eval_kappa_m(profile, mid));
        return kin;
      });
}

GridWavefunction apply_fourier_grid(const GridWavefunction& psi, FourierDirection dir) {
  const double sign = dir == FourierDirection::Forward ? -1.0 : 1.0;
  const double weight = psi.dq() / std::sqrt(2.0 * std::numbers::pi);
  GridWavefunction out{psi.n, psi.extent, Eigen::VectorXcd::Zero(psi.n)};
  for (int j = 0; j < psi.n; ++j) {
    const double x = psi.q(j);
    cd acc = 0.0;
    for (int m = 0; m < psi.n; ++m) acc += std::polar(1.0, sign * x * psi.q(m)) * psi.psi[m];
    out.psi[j] = weight * acc;
  }
  return out;
}

GridMoments observables(const GridWavefunction& psi) {
  const double total = psi.psi.squaredNorm();
  Eigen::VectorXd q(psi.n), k(psi.n);
  for (int j = 0; j < psi.n; ++j) {
    q[j] = psi.q(j);
    k[j] = psi.k(j);
  }
  const Eigen::ArrayXd density = psi.psi.cwiseAbs2().array() / total;
  const double mean_q = (density * q.array()).sum();
  const double var_q = (density * (q.array() - mean_q).square()).sum();

  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum(psi.n);
  fft.fwd(spectrum, psi.psi);
  const Eigen::ArrayXd sdensity = spectrum.cwiseAbs2().array() / spectrum.squaredNorm();
  const double mean_p = (sdensity * k.array()).sum();
  const double var_p = (sdensity * (k.array() - mean_p).square()).sum();

  // Cov = Re <(q - <q>) psi | (p - <p>) psi>
  Eigen::VectorXcd p_spec = spectrum.array() * (k.array() - mean_p).cast<cd>();
  Eigen::VectorXcd p_psi(psi.n);
  fft.inv(p_psi, p_spec);
  const Eigen::VectorXcd q_psi = psi.psi.array() * (q.array() - mean_q).cast<cd>();
  const double cov = q_psi.dot(p_psi).real() / total;

  return {mean_q, mean_p, var_q, var_p, cov};
}

GaussianStated to_gaussian(const GridMoments& m) {
  GaussianStated s;
  s.mean << m.mean_q, m.mean_p;
  s.cov << m.var_q, m.cov_qp, m.cov_qp, m.var_p;
  return s;
}

double invariant_expectation(const GridWavefunction& psi, double rho, double rho_dot) {
  return invariant_expectation(to_gaussian(observables(psi)), rho, rho_dot);
}

double fidelity(const GridWavefunction& a, const GridWavefunction& b) {
  check_shape(a, b);
  return std::norm(a.psi.dot(b.psi)) / (a.psi.squaredNorm() * b.psi.squaredNorm());
}

double trace_distance(const GridWavefunction& a, const GridWavefunction& b) {
  check_shape(a, b);
  const Eigen::VectorXcd ua = a.psi / a.psi.norm();
  const Eigen::VectorXcd ub = b.psi / b.psi.norm();
  return (ub - ua.dot(ub) * ua).norm();
}

void write_snapshot_csv(std::ostream& os, const GridWavefunction& psi) {
  const auto old_precision = os.precision(17);
  os << "q,re_psi,im_psi,abs2\n";
  for (int j = 0; j < psi.n; ++j) {
    os << psi.q(j) << ',' << psi.psi[j].real() << ',' << psi.psi[j].imag() << ','
       << std::norm(psi.psi[j]) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace tdmass
