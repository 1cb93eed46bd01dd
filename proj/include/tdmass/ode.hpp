#pragma once

// Adaptive Dormand-Prince 5(4) integration of small fixed-size ODE systems,
// reporting the state exactly at a caller-supplied strictly increasing grid.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tdmass/errors.hpp"

namespace tdmass {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double initial_step = 1e-3;
  long max_steps = 10'000'000;
};

/// Integrates y' = rhs(t, y) from grid[0] (where y = y0) and returns y at every
/// grid point. Steps are clipped so that each grid point is hit exactly.
/// Throws IntegrationError if the step size underflows.
template <int N, class Rhs>
std::vector<Eigen::Matrix<double, N, 1>> integrate_dopri5(Rhs&& rhs,
                                                          const Eigen::Matrix<double, N, 1>& y0,
                                                          std::span<const double> grid,
                                                          const OdeOptions& opt = {}) {
  using Vec = Eigen::Matrix<double, N, 1>;

  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  // b - b_hat
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  std::vector<Vec> out;
  out.reserve(grid.size());
  if (grid.empty()) return out;
  out.push_back(y0);

  double t = grid[0];
  Vec y = y0;
  Vec k1 = rhs(t, y);
  double h = opt.initial_step;
  long steps = 0;

  for (std::size_t next = 1; next < grid.size(); ++next) {
    const double target = grid[next];
    while (t < target) {
      if (++steps > opt.max_steps) throw IntegrationError("step budget exhausted", t);
      const bool clipped = t + h >= target;
      const double step = clipped ? target - t : h;

      const Vec k2 = rhs(t + c2 * step, y + step * a21 * k1);
      const Vec k3 = rhs(t + c3 * step, y + step * (a31 * k1 + a32 * k2));
      const Vec k4 = rhs(t + c4 * step, y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vec k5 = rhs(t + c5 * step, y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 =
          rhs(t + step, y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec k7 = rhs(t + step, y_new);
      const Vec err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale =
            opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err_norm = std::max(err_norm, std::abs(err[i]) / scale);
      }
      // Trial stages that left the region where rhs is defined count as rejections.
      if (!std::isfinite(err_norm) || !y_new.allFinite()) {
        err_norm = std::numeric_limits<double>::infinity();
      }

      double factor = 5.0;
      if (!std::isfinite(err_norm)) {
        factor = 0.2;
      } else if (err_norm > 0.0) {
        factor = std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      }
      if (err_norm <= 1.0) {
        t = clipped ? target : t + step;
        y = y_new;
        k1 = k7;
        // A clipped step says nothing about the natural step size; only grow from it.
        h = clipped ? std::max(h, step * factor) : step * factor;
      } else {
        h = step * factor;
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        throw IntegrationError("step size underflow", t);
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace tdmass
