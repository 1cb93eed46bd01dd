#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdmass/fock.hpp"
#include "tdmass/gaussian.hpp"

// One fixture ties the phase-space maps of the Gaussian layer to the
// unitaries they stand for, measured in the padded number basis.

using namespace tdmass;
using cd = std::complex<double>;

namespace {

struct ConventionFixture {
  fock::Workspace ws{fock::CheckOptions{}};
  fock::HermitianSpectrum h0{0.5 * (ws.p_squared() + ws.q_squared())};
  cd alpha{0.6, 0.3};
  fock::Vector start = fock::coherent_vector(alpha, ws.options().working_dim());
  GaussianStated gaussian = make_coherent(alpha);

  GaussianStated measure(const fock::Vector& v) const { return fock::moments(v, ws.ops()); }
};

double moment_diff(const GaussianStated& a, const GaussianStated& b) {
  return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), (a.cov - b.cov).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE_FIXTURE(ConventionFixture, "dilation exp(-i s/2 (qp + pq)) scales q by e^s") {
  for (double s : {-0.6, 0.2, 0.9}) {
    CAPTURE(s);
    const auto measured = measure(ws.dilation_spectrum().apply(-0.5 * s, start));
    CHECK(moment_diff(measured, apply_dilation(gaussian, s)) < 1e-8);
  }
}

TEST_CASE_FIXTURE(ConventionFixture, "multiplier exp(i c q^2) shears p by 2cq") {
  for (double c : {-0.7, 0.25, 0.5}) {
    CAPTURE(c);
    const auto measured = measure(ws.q_squared_spectrum().apply(c, start));
    CHECK(moment_diff(measured, apply_shear(gaussian, c)) < 1e-8);
  }
}

TEST_CASE_FIXTURE(ConventionFixture, "exp(-i theta H0) rotates alpha to alpha e^{-i theta}") {
  for (double theta : {0.4, std::numbers::pi / 2, 2.5}) {
    CAPTURE(theta);
    const auto measured = measure(h0.apply(-theta, start));
    CHECK(moment_diff(measured, apply_rotation(gaussian, theta)) < 1e-8);
  }
}

TEST_CASE_FIXTURE(ConventionFixture, "Ermakov unitaries match apply_T_dagger and apply_T") {
  for (auto [rho, rho_dot] : {std::pair{2.0, 0.7}, {0.8, -0.5}, {1.25, 0.3}}) {
    CAPTURE(rho);
    CAPTURE(rho_dot);
    // T^dagger = exp(i rho'/(2 rho) q^2) exp(-i ln(rho)/2 (qp + pq))
    const fock::Vector td = ws.q_squared_spectrum().apply(
        rho_dot / (2 * rho), ws.dilation_spectrum().apply(-0.5 * std::log(rho), start));
    CHECK(moment_diff(measure(td), apply_T_dagger(gaussian, rho, rho_dot)) < 1e-8);

    const fock::Vector t = ws.dilation_spectrum().apply(
        0.5 * std::log(rho), ws.q_squared_spectrum().apply(-rho_dot / (2 * rho), start));
    CHECK(moment_diff(measure(t), apply_T(gaussian, rho, rho_dot)) < 1e-8);

    // The same T, built the way the similarity check builds it.
    const fock::Operator rows = ws.t_rows(rho, rho_dot, ws.options().working_dim());
    CHECK((rows * start - t).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE_FIXTURE(ConventionFixture, "Fourier operator matches fourier_map") {
  const auto rep = fock::fourier_convention(64);
  REQUIRE(rep.sign == -1);
  const fock::Vector f = h0.apply(-std::numbers::pi / 2, start) * std::polar(1.0, std::numbers::pi / 4);
  CHECK(moment_diff(measure(f), fourier_map(gaussian, FourierDirection::Forward)) < 1e-8);
  CHECK(moment_diff(measure(f), make_coherent(-cd(0, 1) * alpha)) < 1e-8);
  const fock::Vector back = h0.apply(std::numbers::pi / 2, start);
  CHECK(moment_diff(measure(back), fourier_map(gaussian, FourierDirection::Inverse)) < 1e-8);
}

TEST_CASE_FIXTURE(ConventionFixture, "invariant expectation agrees with the matrix expectation") {
  const double rho = 1.6, rho_dot = -0.4;
  const fock::Operator inv =
      0.5 * (ws.q_squared() / (rho * rho) + rho * rho * ws.p_squared() +
             rho_dot * rho_dot * ws.q_squared() - rho * rho_dot * ws.dilation_generator());
  const double matrix = start.dot(inv * start).real();
  CHECK(std::abs(matrix - invariant_expectation(gaussian, rho, rho_dot)) < 1e-10);

  const auto one = fock::coherent_vector(1.0, ws.options().working_dim());
  const fock::Operator h = 0.5 * (ws.p_squared() + ws.q_squared());
  CHECK(std::abs(one.dot(h * one).real() - 1.5) < 1e-10);
}
