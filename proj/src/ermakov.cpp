#include "tdmass/ermakov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>

#include <Eigen/Dense>

#include "tdmass/errors.hpp"

namespace tdmass {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_grid(const MassProfile& profile, const Eigen::VectorXd& grid) {
  if (grid.size() < 1) throw DomainError("empty tau grid");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("tau grid must be strictly increasing");
  }
  check_domain(profile, grid[0]);
  check_domain(profile, grid[grid.size() - 1]);
}

double rho_ddot(double rho, double kappa_m) {
  return 1.0 / (rho * rho * rho) - rho / kappa_m;
}

// Cubic Hermite interpolant on [0, h] at t in [0, 1].
double hermite(double y0, double d0, double y1, double d1, double h, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

}  // namespace

USamples solve_u(const MassProfile& profile, double tau0, double u0, double u_dot0,
                 const Eigen::VectorXd& grid, const OdeOptions& opt) {
  check_grid(profile, grid);
  if (grid[0] != tau0) throw DomainError("solve_u: grid must start at tau0");

  auto rhs = [&profile](double t, const Eigen::Vector2d& y) {
    return Eigen::Vector2d(y[1], -y[0] * omega_squared(profile, t));
  };
  const auto states = integrate_dopri5<2>(rhs, Eigen::Vector2d(u0, u_dot0), as_span(grid), opt);

  USamples out{grid, Eigen::VectorXd(grid.size()), Eigen::VectorXd(grid.size())};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out.u[i] = states[static_cast<std::size_t>(i)][0];
    out.u_dot[i] = states[static_cast<std::size_t>(i)][1];
  }
  return out;
}

ErmakovSolution rho_from_u(const MassProfile& profile, const USamples& u, double s0) {
  const Eigen::Index n = u.tau.size();
  if (u.u.size() != n || u.u_dot.size() != n) throw ShapeError("rho_from_u: column sizes differ");
  check_grid(profile, u.tau);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (u.u[i] == 0.0 || (i > 0 && u.u[i] * u.u[i - 1] < 0.0)) {
      throw SingularityError("u vanishes on the grid, 1/u^2 is not integrable", u.tau[i]);
    }
  }

  ErmakovSolution sol;
  sol.source = ErmakovSource::FromU;
  sol.tau = u.tau;
  sol.rho.resize(n);
  sol.rho_dot.resize(n);
  sol.theta.resize(n);
  sol.kappa_m.resize(n);

  // S' = f = 1/u^2 with f' = -2 u'/u^3 known at the samples: trapezoid plus the
  // endpoint-derivative correction is exact for the cubic Hermite interpolant of f.
  double s = s0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ui = u.u[i];
    if (i > 0) {
      const double h = u.tau[i] - u.tau[i - 1];
      const double ua = u.u[i - 1];
      const double fa = 1.0 / (ua * ua);
      const double fb = 1.0 / (ui * ui);
      const double dfa = -2.0 * u.u_dot[i - 1] / (ua * ua * ua);
      const double dfb = -2.0 * u.u_dot[i] / (ui * ui * ui);
      s += 0.5 * h * (fa + fb) + h * h / 12.0 * (dfa - dfb);
    }
    const double root = std::sqrt(1.0 + s * s);
    const double rho = std::abs(ui) * root;
    sol.rho[i] = rho;
    sol.rho_dot[i] = (ui * u.u_dot[i] * (1.0 + s * s) + s) / rho;
    sol.theta[i] = std::atan(s) - std::atan(s0);
    sol.kappa_m[i] = eval_kappa_m(profile, u.tau[i]);
  }
  return sol;
}

ErmakovSolution solve_ermakov_direct(const MassProfile& profile, double tau0, double rho0,
                                     double rho_dot0, const Eigen::VectorXd& grid,
                                     const OdeOptions& opt) {
  check_grid(profile, grid);
  if (grid[0] != tau0) throw DomainError("solve_ermakov_direct: grid must start at tau0");
  if (!(rho0 > 0.0)) throw DomainError("solve_ermakov_direct: rho0 must be positive");

  auto rhs = [&profile](double t, const Eigen::Vector3d& y) {
    const double rho = y[0];
    if (!(rho > 0.0)) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return Eigen::Vector3d(nan, nan, nan);
    }
    const double inv2 = 1.0 / (rho * rho);
    return Eigen::Vector3d(y[1], inv2 / rho - rho * omega_squared(profile, t), inv2);
  };

  std::vector<Eigen::Vector3d> states;
  try {
    states = integrate_dopri5<3>(rhs, Eigen::Vector3d(rho0, rho_dot0, 0.0), as_span(grid), opt);
  } catch (const IntegrationError& e) {
    throw SingularityError("Ermakov integration collapsed (rho -> 0)", e.tau());
  }

  ErmakovSolution sol;
  sol.source = ErmakovSource::DirectODE;
  sol.tau = grid;
  const Eigen::Index n = grid.size();
  sol.rho.resize(n);
  sol.rho_dot.resize(n);
  sol.theta.resize(n);
  sol.kappa_m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& y = states[static_cast<std::size_t>(i)];
    if (!(y[0] > 0.0)) throw SingularityError("rho reached zero", grid[i]);
    sol.rho[i] = y[0];
    sol.rho_dot[i] = y[1];
    sol.theta[i] = y[2];
    sol.kappa_m[i] = eval_kappa_m(profile, grid[i]);
  }
  return sol;
}

ErmakovSolution closed_form_solution(const MassProfile& profile, const Eigen::VectorXd& grid) {
  if (!has_closed_form(profile)) {
    throw DomainError("no closed form available for profile " + label(profile));
  }
  check_grid(profile, grid);
  ErmakovSolution sol;
  sol.source = ErmakovSource::ClosedForm;
  sol.tau = grid;
  const Eigen::Index n = grid.size();
  sol.rho.resize(n);
  sol.rho_dot.resize(n);
  sol.theta.resize(n);
  sol.kappa_m.resize(n);
  const double theta0 = *analytic_theta(profile, grid[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    sol.rho[i] = *analytic_rho(profile, grid[i]);
    sol.rho_dot[i] = *analytic_rho_dot(profile, grid[i]);
    sol.theta[i] = *analytic_theta(profile, grid[i]) - theta0;
    sol.kappa_m[i] = eval_kappa_m(profile, grid[i]);
  }
  sol.theta[0] = 0.0;
  return sol;
}

ErmakovSolution reference_solution(const MassProfile& profile, const Eigen::VectorXd& grid,
                                   const OdeOptions& opt) {
  if (has_closed_form(profile)) return closed_form_solution(profile, grid);
  if (grid.size() == 0) throw DomainError("empty grid");
  const double rho0 = std::pow(eval_kappa_m(profile, grid[0]), 0.25);
  return solve_ermakov_direct(profile, grid[0], rho0, 0.0, grid, opt);
}

double ermakov_residual(const ErmakovSolution& solution, const MassProfile& profile) {
  const Eigen::Index n = solution.size();
  if (n < 5) throw DomainError("ermakov_residual needs at least 5 samples");

  double worst = 0.0;
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    // Second-derivative weights on the five surrounding nodes, from the
    // moment conditions sum_j w_j d_j^k / k! = [k == 2], k = 0..4.
    const double scale = solution.tau[i + 1] - solution.tau[i - 1];
    Eigen::Matrix<double, 5, 5> moments;
    for (int j = 0; j < 5; ++j) {
      const double d = (solution.tau[i - 2 + j] - solution.tau[i]) / scale;
      double power = 1.0;
      double factorial = 1.0;
      for (int k = 0; k < 5; ++k) {
        if (k > 0) factorial *= k;
        moments(k, j) = power / factorial;
        power *= d;
      }
    }
    Eigen::Matrix<double, 5, 1> rhs = Eigen::Matrix<double, 5, 1>::Zero();
    rhs[2] = 1.0;
    const Eigen::Matrix<double, 5, 1> w = moments.fullPivLu().solve(rhs);
    const double second = w.dot(solution.rho.segment<5>(i - 2)) / (scale * scale);

    const double rho = solution.rho[i];
    const double residual =
        second + rho / eval_kappa_m(profile, solution.tau[i]) - 1.0 / (rho * rho * rho);
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

ErmakovPoint sample_at(const ErmakovSolution& s, double tau) {
  const Eigen::Index n = s.size();
  if (n == 0 || !(tau >= s.tau[0] && tau <= s.tau[n - 1])) {
    throw DomainError("tau outside the Ermakov solution grid");
  }
  const double* begin = s.tau.data();
  const double* it = std::lower_bound(begin, begin + n, tau);
  Eigen::Index k = it - begin;
  if (*it == tau) return {tau, s.rho[k], s.rho_dot[k], s.theta[k]};
  k -= 1;

  const double h = s.tau[k + 1] - s.tau[k];
  const double t = (tau - s.tau[k]) / h;
  const double r0 = s.rho[k], r1 = s.rho[k + 1];
  const double v0 = s.rho_dot[k], v1 = s.rho_dot[k + 1];
  return {tau, hermite(r0, v0, r1, v1, h, t),
          hermite(v0, rho_ddot(r0, s.kappa_m[k]), v1, rho_ddot(r1, s.kappa_m[k + 1]), h, t),
          hermite(s.theta[k], 1.0 / (r0 * r0), s.theta[k + 1], 1.0 / (r1 * r1), h, t)};
}

std::vector<CriticalPoint> find_critical_points(const ErmakovSolution& s) {
  // Below this |rho'| is treated as an exact zero, so equilibrium plateaus
  // do not produce spurious sign flips from rounding.
  constexpr double zero_band = 1e-13;
  auto sign_of = [](double v) { return v > zero_band ? 1 : (v < -zero_band ? -1 : 0); };

  std::vector<CriticalPoint> found;
  Eigen::Index last = -1;
  int last_sign = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int sg = sign_of(s.rho_dot[i]);
    if (sg == 0) continue;
    if (last >= 0 && sg != last_sign) {
      double lo = s.tau[last];
      double hi = s.tau[i];
      for (int iter = 0; iter < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double v = sample_at(s, mid).rho_dot;
        if (v == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((v > 0) == (last_sign > 0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const ErmakovPoint p = sample_at(s, 0.5 * (lo + hi));
      found.push_back({p.tau, p.rho, last_sign < 0});
    }
    last = i;
    last_sign = sg;
  }
  return found;
}

void write_csv(std::ostream& os, const ErmakovSolution& s) {
  const auto old_precision = os.precision(17);
  os << "tau,rho,rho_dot,theta,kappa_m\n";
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    os << s.tau[i] << ',' << s.rho[i] << ',' << s.rho_dot[i] << ',' << s.theta[i] << ','
       << s.kappa_m[i] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace tdmass
