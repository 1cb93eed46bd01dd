#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "tdmass/errors.hpp"
#include "tdmass/fock.hpp"

using namespace tdmass;
using namespace tdmass::fock;
using cd = std::complex<double>;

namespace {

constexpr cd I{0.0, 1.0};

double max_abs(const Operator& m) { return m.cwiseAbs().maxCoeff(); }

const Workspace& workspace64() {
  static const Workspace ws{CheckOptions{}};
  return ws;
}

}  // namespace

TEST_CASE("build_quadratures") {
  const auto ops = build_quadratures(64);
  CHECK(std::abs((ops.q * ops.q)(0, 0) - 0.5) < 1e-15);
  const Operator n = ops.a_dag * ops.a;
  for (int k = 0; k < 64; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
  CHECK(max_abs(n - Operator(n.diagonal().asDiagonal())) == 0.0);

  const Operator comm = ops.q * ops.p - ops.p * ops.q;
  CHECK(std::abs(comm(0, 0) - I) < 1e-14);
  CHECK(max_abs(comm.topLeftCorner(62, 62) - I * Operator::Identity(62, 62)) < 1e-10);
  CHECK(max_abs(ops.q - ops.q.adjoint()) < 1e-12);
  CHECK(max_abs(ops.p - ops.p.adjoint()) < 1e-12);
  CHECK(max_abs(ops.a - (ops.q + I * ops.p) / std::sqrt(2.0)) < 1e-14);

  CHECK_THROWS_AS(build_quadratures(4), DomainError);
}

TEST_CASE("matrix_exp") {
  const auto ops = build_quadratures(32);
  CHECK(matrix_exp(Operator::Zero(32, 32)).isIdentity(0.0));

  const Operator parity = matrix_exp(I * std::numbers::pi * (ops.a_dag * ops.a));
  for (int k = 0; k < 32; ++k) CHECK(std::abs(parity(k, k) - double(k % 2 == 0 ? 1 : -1)) < 1e-12);
  CHECK(max_abs(parity - Operator(parity.diagonal().asDiagonal())) < 1e-12);

  const Operator a = I * 0.3 * (ops.q * ops.q);
  CHECK(max_abs(matrix_exp(a) * matrix_exp(-a) - Operator::Identity(32, 32)) < 1e-10);

  Operator huge = Operator::Zero(2, 2);
  huge(0, 0) = 1e6;
  CHECK_THROWS_AS(matrix_exp(huge), std::overflow_error);
  huge(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exp(huge), std::overflow_error);
}

TEST_CASE("HermitianSpectrum matches matrix_exp") {
  const auto ops = build_quadratures(48);
  const Operator g = ops.q * ops.p + ops.p * ops.q;
  const Operator mixed = ops.q * ops.q + 0.4 * g + 0.3 * ops.q;  // couples parities

  const HermitianSpectrum sg(g);
  CHECK(sg.parity_split());
  CHECK(max_abs(sg.exp(0.35) - matrix_exp(I * 0.35 * g)) < 1e-11);
  CHECK(max_abs(sg.exp_block(0.35, 10, 20) - sg.exp(0.35).topLeftCorner(10, 20)) < 1e-14);

  const HermitianSpectrum sm(mixed);
  CHECK_FALSE(sm.parity_split());
  CHECK(max_abs(sm.exp(-0.7) - matrix_exp(-I * 0.7 * mixed)) < 1e-11);
  CHECK(max_abs(expi_hermitian(mixed, -0.7) - sm.exp(-0.7)) < 1e-14);

  const Operator m = ops.a.topRows(5);
  CHECK(max_abs(sg.right_multiply(m, 0.2) - m * sg.exp(0.2)) < 1e-12);
  const Vector v = coherent_vector(cd(0.5, 0.5), 48);
  CHECK((sg.apply(0.2, v) - sg.exp(0.2) * v).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(HermitianSpectrum(Operator::Zero(3, 4)), ShapeError);
}

TEST_CASE("coherent_vector") {
  const Vector vac = coherent_vector(0.0, 32);
  CHECK(vac[0] == cd(1.0));
  CHECK(vac.tail(31).isZero(0.0));
  CHECK(std::abs(std::abs(coherent_vector(1.0, 64)[0]) - 0.606531) < 1e-6);
  CHECK(std::abs(std::abs(coherent_vector(1.0, 64)[0]) - std::exp(-0.5)) < 1e-9);

  const auto ops = build_quadratures(64);
  const Vector c = coherent_vector(cd(1.0, 1.0), 64);
  CHECK(std::abs(c.dot(ops.a_dag * ops.a * c).real() - 2.0) < 1e-8);
  CHECK(std::abs(c.norm() - 1.0) < 1e-10);
  CHECK(c.tail(16).squaredNorm() < 1e-8);
  CHECK(((ops.a * c).head(48) - cd(1.0, 1.0) * c.head(48)).cwiseAbs().maxCoeff() < 1e-12);

  const auto m = moments(c, ops);
  CHECK(m.mean[0] == doctest::Approx(std::numbers::sqrt2));
  CHECK(m.mean[1] == doctest::Approx(std::numbers::sqrt2));
  CHECK(m.cov.isApprox(Eigen::Matrix2d::Identity() / 2, 1e-10));

  CHECK_THROWS_AS(coherent_vector(4.0, 64), DomainError);
}

TEST_CASE("check_bch") {
  const auto& ws = workspace64();
  SUBCASE("reference values") {
    CHECK(check_bch(2.0, 1.0, ws).discrepancy < 1e-6);
    CHECK(check_bch(0.5, -1.0, ws).discrepancy < 1e-6);
    for (double rho : {0.5, 1.3, 2.0}) CHECK(check_bch(rho, 0.0, ws).discrepancy < 1e-10);
  }
  SUBCASE("limit at rho = 1") {
    CHECK(check_bch(1.0, 0.6, ws).discrepancy < 1e-10);
    CHECK(check_bch(1.0 + 1e-7, 0.6, ws).discrepancy < 1e-6);
  }
  SUBCASE("report fields") {
    const auto r = check_bch(2.0, 1.0, ws);
    CHECK(r.check == "bch_factorization");
    CHECK(r.trusted_block == 48);
    CHECK(r.tolerance == 1e-6);
    CHECK(r.pass);
    CHECK(r.parameters["working_dim"] == 512);
    CHECK(r.parameters["sign"] == "appendix");
    const auto j = to_json(r);
    CHECK(j["pass"] == true);
    CHECK(j["trusted_block"] == 48);
  }
  SUBCASE("the opposite sign does not factorize") {
    CheckOptions opt;
    opt.sign = ShearSign::MainText;
    const Workspace wrong(opt);
    const auto r = check_bch(2.0, 1.0, wrong);
    CHECK_FALSE(r.pass);
    CHECK(r.discrepancy > 1e-2);
    CHECK(check_bch(1.25, -0.3, wrong).discrepancy > 1e-3);
  }
  SUBCASE("rho must be positive") { CHECK_THROWS_AS(check_bch(0.0, 1.0, ws), DomainError); }
}

TEST_CASE("check_invariant_similarity") {
  const auto& ws = workspace64();
  CHECK(check_invariant_similarity(1.0, 0.0, ws).discrepancy < 1e-12);
  CHECK(check_invariant_similarity(2.0, 0.7, ws).discrepancy < 1e-8);
  CHECK(check_invariant_similarity(0.8, -0.5, ws).discrepancy < 1e-8);
  const auto r = check_invariant_similarity(0.8, -0.5, ws);
  CHECK(r.check == "invariant_similarity");
  CHECK_FALSE(r.parameters.contains("sign"));
  CHECK(r.pass);

  // Leading rows of a unitary are orthonormal.
  const auto rows = ws.t_rows(2.0, 0.7, 48);
  CHECK(rows.rows() == 48);
  CHECK(rows.cols() == 512);
  CHECK(max_abs(rows * rows.adjoint() - Operator::Identity(48, 48)) < 1e-10);
}

TEST_CASE("unpadded basis is not trustworthy") {
  CheckOptions plain;
  plain.padding = 1;
  CHECK(check_bch(2.0, 1.0, plain).discrepancy > 1e-6);
}

TEST_CASE("fourier_convention") {
  const auto rep = fourier_convention(64);
  CHECK(rep.sign == -1);
  CHECK(rep.vacuum_overlap >= 1 - 1e-10);
  CHECK(rep.parity_overlap >= 1 - 1e-8);
  REQUIRE(rep.probes.size() == 3);
  for (const auto& p : rep.probes) {
    CAPTURE(p.alpha);
    CHECK(((p.overlap_minus_i > 1 - 1e-8) != (p.overlap_plus_i > 1 - 1e-8)));
    CHECK(p.overlap_minus_i > 1 - 1e-8);
  }
}
