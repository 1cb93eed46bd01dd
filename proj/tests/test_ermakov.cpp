#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "tdmass/ermakov.hpp"
#include "tdmass/errors.hpp"

using namespace tdmass;
using Eigen::VectorXd;

namespace {

VectorXd linspace(double a, double b, int n) { return VectorXd::LinSpaced(n, a, b); }

double max_abs_diff(const VectorXd& a, const VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

ErmakovSolution hyperbolic_from_u(double beta, const VectorXd& grid) {
  const auto profile = make_hyperbolic(beta);
  const double t0 = grid[0];
  const auto u = solve_u(profile, t0, *analytic_u(profile, t0), *analytic_u_dot(profile, t0), grid);
  return rho_from_u(profile, u, *analytic_s(profile, t0));
}

}  // namespace

TEST_CASE("integrator reports step-size underflow") {
  // y' = y^2 from y(0) = 1 blows up at t = 1.
  const VectorXd grid = linspace(0.0, 2.0, 3);
  auto rhs = [](double, const Eigen::Matrix<double, 1, 1>& y) {
    return Eigen::Matrix<double, 1, 1>(y[0] * y[0]);
  };
  try {
    integrate_dopri5<1>(rhs, Eigen::Matrix<double, 1, 1>(1.0), {grid.data(), 3});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.tau() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("solve_u against closed forms") {
  SUBCASE("quadratic") {
    const auto u = solve_u(make_quadratic(1.0), 0.0, 1.0, 1.0, linspace(0.0, 1.5, 4));
    CHECK(std::abs(u.u[3] - 2.0) < 1e-8);
  }
  SUBCASE("hyperbolic seeded at 0.1") {
    const double u0 = std::tanh(0.1), v0 = 1.0 / std::pow(std::cosh(0.1), 2);
    CHECK(u0 == doctest::Approx(0.0996680).epsilon(1e-6));
    CHECK(v0 == doctest::Approx(0.9900663).epsilon(1e-6));
    const auto u = solve_u(make_hyperbolic(1.0), 0.1, u0, v0, linspace(0.1, 1.0, 10));
    CHECK(std::abs(u.u[9] - std::tanh(1.0)) < 1e-8);
  }
  SUBCASE("static oscillator") {
    VectorXd grid(2);
    grid << 0.0, std::numbers::pi / 2;
    const auto u = solve_u(make_constant(1.0, 0.0, 10.0), 0.0, 0.0, 1.0, grid);
    CHECK(std::abs(u.u[1] - 1.0) < 1e-8);
  }
  SUBCASE("grid must start at tau0") {
    CHECK_THROWS_AS(solve_u(make_quadratic(1.0), 0.5, 1.0, 1.0, linspace(0.0, 1.0, 3)),
                    DomainError);
  }
}

TEST_CASE("Wronskian of two solve_u solutions is constant") {
  const auto profile = make_hyperbolic(0.5);
  const VectorXd grid = linspace(0.0, 6.0, 301);
  const auto a = solve_u(profile, 0.0, 1.0, 0.0, grid);
  const auto b = solve_u(profile, 0.0, 0.0, 1.0, grid);
  const VectorXd w = a.u.cwiseProduct(b.u_dot) - b.u.cwiseProduct(a.u_dot);
  CHECK((w.array() - 1.0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("rho_from_u") {
  SUBCASE("static oscillator gives rho = 1") {
    USamples s;
    s.tau = linspace(0.1, 3.0, 3001);
    s.u = s.tau.array().sin();
    s.u_dot = s.tau.array().cos();
    const auto sol = rho_from_u(make_constant(1.0, 0.0, 10.0), s, -1.0 / std::tan(0.1));
    CHECK((sol.rho.array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK(sol.source == ErmakovSource::FromU);
    CHECK(sol.theta[0] == 0.0);
  }
  SUBCASE("quadratic closed form") {
    const auto profile = make_quadratic(1.0);
    const double tq = (std::exp(2.0) - 1.0) / 2.0;
    const auto u = solve_u(profile, 0.0, 1.0, 1.0, linspace(0.0, tq, 2001));
    const auto sol = rho_from_u(profile, u, 0.0);
    CHECK(std::abs(sol.rho[2000] - 3.84423102815912) < 1e-6);
  }
  SUBCASE("hyperbolic closed form") {
    const auto sol = hyperbolic_from_u(1.0, linspace(0.1, 1.0, 901));
    CHECK(0.1 - 1.0 / std::tanh(0.1) == doctest::Approx(*analytic_s(make_hyperbolic(1.0), 0.1)));
    CHECK(std::abs(sol.rho[900] - 0.798036969607560) < 1e-6);
  }
  SUBCASE("u crossing zero is a singularity") {
    USamples s;
    s.tau = linspace(0.1, 4.0, 100);
    s.u = s.tau.array().sin();
    s.u_dot = s.tau.array().cos();
    CHECK_THROWS_AS(rho_from_u(make_constant(1.0, 0.0, 10.0), s, 0.0), SingularityError);
  }
}

TEST_CASE("solve_ermakov_direct") {
  SUBCASE("equilibrium") {
    const VectorXd grid = linspace(0.0, 5.0, 51);
    const auto sol = solve_ermakov_direct(make_constant(1.0, 0.0, 10.0), 0.0, 1.0, 0.0, grid);
    CHECK((sol.rho.array() - 1.0).abs().maxCoeff() < 1e-8);
    CHECK(max_abs_diff(sol.theta, grid) < 1e-8);
  }
  SUBCASE("quadratic seeded from the closed form at 0") {
    const auto profile = make_quadratic(1.0);
    // rho'(0) = 1 from the derivative of the closed form; finite-difference cross-check.
    const double h = 1e-5;
    const double fd = (*analytic_rho(profile, 2 * h) * -1.0 + 4.0 * *analytic_rho(profile, h) -
                       3.0 * *analytic_rho(profile, 0.0)) /
                      (2 * h);
    CHECK(std::abs(fd - 1.0) < 1e-8);
    const VectorXd grid = linspace(0.0, 5.0, 501);
    const auto sol = solve_ermakov_direct(profile, 0.0, 1.0, 1.0, grid);
    const auto exact = closed_form_solution(profile, grid);
    CHECK(max_abs_diff(sol.rho, exact.rho) < 1e-6);
    CHECK(max_abs_diff(sol.theta, exact.theta) < 1e-6);
  }
  SUBCASE("hyperbolic seeded at 0.1") {
    const auto profile = make_hyperbolic(1.0);
    const VectorXd grid = linspace(0.1, 5.0, 491);
    const auto sol = solve_ermakov_direct(profile, 0.1, *analytic_rho(profile, 0.1),
                                          *analytic_rho_dot(profile, 0.1), grid);
    const auto exact = closed_form_solution(profile, grid);
    CHECK(max_abs_diff(sol.rho, exact.rho) < 1e-6);
    CHECK(max_abs_diff(sol.theta, exact.theta) < 1e-6);
  }
  SUBCASE("rho0 must be positive") {
    CHECK_THROWS_AS(solve_ermakov_direct(make_quadratic(1.0), 0.0, 0.0, 1.0, linspace(0, 1, 3)),
                    DomainError);
  }
}

TEST_CASE("consistency triangle") {
  for (const auto& profile : {make_hyperbolic(1.0), make_hyperbolic(0.5), make_quadratic(1.0)}) {
    CAPTURE(label(profile));
    const double t0 = std::holds_alternative<Hyperbolic>(profile) ? 0.1 : 0.0;
    const VectorXd grid = linspace(t0, 5.0, 4001);
    const auto closed = closed_form_solution(profile, grid);
    const auto u = solve_u(profile, t0, *analytic_u(profile, t0), *analytic_u_dot(profile, t0), grid);
    const auto from_u = rho_from_u(profile, u, *analytic_s(profile, t0));
    const auto direct =
        solve_ermakov_direct(profile, t0, closed.rho[0], closed.rho_dot[0], grid);
    CHECK(max_abs_diff(closed.rho, from_u.rho) < 1e-6);
    CHECK(max_abs_diff(closed.rho, direct.rho) < 1e-6);
    CHECK(max_abs_diff(from_u.rho, direct.rho) < 1e-6);
    CHECK(max_abs_diff(closed.theta, from_u.theta) < 1e-6);
    CHECK(max_abs_diff(closed.theta, direct.theta) < 1e-6);
    CHECK(max_abs_diff(closed.rho_dot, from_u.rho_dot) < 1e-6);

    for (const auto* sol : {&closed, &from_u, &direct}) {
      for (Eigen::Index i = 1; i < sol->size(); ++i) CHECK(sol->theta[i] > sol->theta[i - 1]);
      CHECK((sol->rho.array() > 0).all());
    }
  }
}

TEST_CASE("ermakov_residual") {
  CHECK(ermakov_residual(closed_form_solution(make_hyperbolic(1.0), linspace(0.2, 5.0, 2000)),
                         make_hyperbolic(1.0)) < 1e-6);
  CHECK(ermakov_residual(closed_form_solution(make_quadratic(1.0), linspace(0.0, 5.0, 2000)),
                         make_quadratic(1.0)) < 1e-6);
  const auto flat = make_constant(1.0, 0.0, 10.0);
  CHECK(ermakov_residual(solve_ermakov_direct(flat, 0.0, 1.0, 0.0, linspace(0.0, 5.0, 100)), flat) <
        1e-12);

  // A wrong seed gives rho' inconsistent with the closed form but still an
  // Ermakov solution; a perturbed rho is not.
  auto bad = closed_form_solution(make_quadratic(1.0), linspace(0.0, 5.0, 2000));
  bad.rho *= 1.01;
  CHECK(ermakov_residual(bad, make_quadratic(1.0)) > 1e-3);
  CHECK_THROWS_AS(ermakov_residual(closed_form_solution(make_quadratic(1.0), linspace(0, 1, 4)),
                                   make_quadratic(1.0)),
                  DomainError);
}

TEST_CASE("find_critical_points") {
  SUBCASE("quadratic has none") {
    for (double gamma : {1.0, 5.0, 10.0}) {
      const auto sol = closed_form_solution(make_quadratic(gamma), linspace(0.0, 10.0, 2001));
      CHECK((sol.rho_dot.array() > 0).all());
      CHECK(find_critical_points(sol).empty());
    }
  }
  SUBCASE("hyperbolic beta = 1 has one minimum") {
    const auto sol = closed_form_solution(make_hyperbolic(1.0), linspace(0.1, 5.0, 2000));
    const auto cps = find_critical_points(sol);
    REQUIRE(cps.size() == 1);
    CHECK(std::abs(cps[0].tau - 0.96) < 0.01);
    CHECK(std::abs(cps[0].rho - 0.797) < 0.01);
    // mpmath root of d rho/d tau: 0.962730305563342, rho = 0.797149597604441
    CHECK(std::abs(cps[0].tau - 0.962730305563342) < 1e-8);
    CHECK(std::abs(cps[0].rho - 0.797149597604441) < 1e-10);
    CHECK(cps[0].minimum);
    CHECK(std::abs(*analytic_rho_dot(make_hyperbolic(1.0), cps[0].tau)) < 1e-8);
  }
  SUBCASE("equilibrium plateau is not a critical point") {
    const auto flat = make_constant(1.0, 0.0, 10.0);
    CHECK(find_critical_points(solve_ermakov_direct(flat, 0.0, 1.0, 0.0, linspace(0, 5, 100)))
              .empty());
  }
  SUBCASE("maximum of an oscillating rho") {
    // Static oscillator with rho0 != 1 breathes: rho^2 = cos^2/a^2... minima and maxima alternate.
    const auto flat = make_constant(1.0, 0.0, 10.0);
    const auto sol = solve_ermakov_direct(flat, 0.0, 2.0, 0.0, linspace(0.0, 6.0, 601));
    const auto cps = find_critical_points(sol);
    // rho^2 = 4 cos^2 t + sin^2 t / 4: extrema at t = pi/2 (min), pi (max), 3pi/2 (min).
    REQUIRE(cps.size() == 3);
    CHECK(cps[0].tau == doctest::Approx(std::numbers::pi / 2).epsilon(1e-8));
    CHECK(cps[0].minimum);
    CHECK(cps[1].tau == doctest::Approx(std::numbers::pi).epsilon(1e-8));
    CHECK_FALSE(cps[1].minimum);
    CHECK(cps[1].rho == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("sample_at") {
  const auto profile = make_hyperbolic(1.0);
  const auto sol = closed_form_solution(profile, linspace(0.1, 3.0, 300));
  const auto p = sample_at(sol, sol.tau[17]);
  CHECK(p.rho == sol.rho[17]);
  CHECK(p.theta == sol.theta[17]);
  const auto mid = sample_at(sol, 1.2345);
  CHECK(std::abs(mid.rho - *analytic_rho(profile, 1.2345)) < 1e-10);
  CHECK(std::abs(mid.rho_dot - *analytic_rho_dot(profile, 1.2345)) < 1e-9);
  CHECK(std::abs(mid.theta - (*analytic_theta(profile, 1.2345) - *analytic_theta(profile, 0.1))) <
        1e-10);
  CHECK_THROWS_AS(sample_at(sol, 3.5), DomainError);
}

TEST_CASE("csv output") {
  const auto sol = closed_form_solution(make_quadratic(1.0), linspace(0.0, 1.0, 3));
  std::ostringstream os;
  write_csv(os, sol);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header == "tau,rho,rho_dot,theta,kappa_m");
  CHECK(first == "0,1,1,0,1");
  std::string second;
  std::getline(is, second);
  // 17 significant digits
  CHECK(second.substr(0, 23) == "0.5,1.4967386234607232,");
}
