#include "tdmass/verify.hpp"

#include <algorithm>
#include <cmath>

#include "tdmass/ermakov.hpp"
#include "tdmass/errors.hpp"
#include "tdmass/gaussian.hpp"
#include "tdmass/grid.hpp"

namespace tdmass {

namespace {

// Closed-form (or reference) Ermakov data from the domain start to tau_end,
// sampled finely enough for Hermite interpolation to be exact to rounding.
ErmakovSolution reference_on(const MassProfile& profile, double tau_start, double tau_end) {
  const int n = std::max(2, static_cast<int>(std::ceil((tau_end - tau_start) / 1e-3)) + 1);
  return reference_solution(profile, Eigen::VectorXd::LinSpaced(n, tau_start, tau_end));
}

double latest(const std::vector<double>& times) {
  if (times.empty()) throw DomainError("no verification times given");
  return *std::max_element(times.begin(), times.end());
}

// Checkpoints every 0.1 from the start plus every requested time, sorted.
std::vector<double> checkpoints(double start, const std::vector<double>& times) {
  std::vector<double> out;
  const double end = latest(times);
  for (int k = 1; start + 0.1 * k < end - 1e-9; ++k) out.push_back(start + 0.1 * k);
  for (double t : times) {
    if (!(t > start)) throw DomainError("verification time must follow the grid start");
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-9; }),
            out.end());
  return out;
}

bool is_requested(double t, const std::vector<double>& times) {
  return std::any_of(times.begin(), times.end(), [t](double x) { return std::abs(x - t) < 1e-9; });
}

nlohmann::json run_parameters(const MassProfile& profile, const VerifyConfig& cfg) {
  return {{"profile", to_json(profile)},
          {"alpha", {cfg.alpha.real(), cfg.alpha.imag()}},
          {"grid_n", cfg.grid_n},
          {"grid_l", cfg.grid_l},
          {"dt", cfg.dt}};
}

CheckResult make_result(std::string name, nlohmann::json parameters, double discrepancy,
                        double tolerance) {
  CheckResult r;
  r.check = std::move(name);
  r.parameters = std::move(parameters);
  r.discrepancy = discrepancy;
  r.tolerance = tolerance;
  r.pass = discrepancy < tolerance;
  return r;
}

}  // namespace

std::vector<std::pair<double, double>> operator_check_grid() {
  std::vector<std::pair<double, double>> out;
  for (double rho : {0.5, 0.8, 1.25, 2.0}) {
    for (double rho_dot : {-1.0, -0.3, 0.3, 1.0}) out.emplace_back(rho, rho_dot);
  }
  return out;
}

double grid_start(const MassProfile& profile) {
  return std::holds_alternative<Hyperbolic>(profile) ? 0.1 : domain(profile).lo;
}

GaussianStated transformed_initial(const MassProfile& profile, std::complex<double> alpha) {
  const GaussianStated at_origin = fourier_map(make_coherent(alpha), FourierDirection::Inverse);
  const double lo = domain(profile).lo;
  const double start = grid_start(profile);
  if (start == lo) return at_origin;
  return propagate(profile, reference_on(profile, lo, start), start, at_origin).state;
}

std::vector<CheckResult> check_grid_against_propagator(const MassProfile& profile,
                                                       const VerifyConfig& cfg) {
  const double start = grid_start(profile);
  const auto ermakov = reference_on(profile, start, latest(cfg.times));
  const GaussianStated initial = transformed_initial(profile, cfg.alpha);

  std::vector<CheckResult> out;
  GridWavefunction psi = sample_gaussian(initial, cfg.grid_n, cfg.grid_l);
  const double i0 = invariant_expectation(psi, ermakov.rho[0], ermakov.rho_dot[0]);
  double drift = 0.0;
  double t = start;
  for (double next : checkpoints(start, cfg.times)) {
    psi = evolve_transformed(psi, profile, t, next, cfg.dt);
    t = next;
    const ErmakovPoint at = sample_at(ermakov, t);
    drift = std::max(drift, std::abs(invariant_expectation(psi, at.rho, at.rho_dot) - i0) / i0);
    if (is_requested(t, cfg.times)) {
      const auto exact = propagate(profile, ermakov, t, initial);
      auto params = run_parameters(profile, cfg);
      params["tau"] = t;
      const double f = fidelity(psi, sample_gaussian(exact.state, cfg.grid_n, cfg.grid_l));
      params["fidelity"] = f;
      out.push_back(make_result("propagator_fidelity", params, std::max(0.0, 1.0 - f), 1e-3));
    }
  }
  out.push_back(make_result("invariant_drift_grid", run_parameters(profile, cfg), drift, 1e-3));

  double analytic_drift = 0.0;
  const double a0 = propagate(profile, ermakov, start, initial).invariant;
  for (Eigen::Index i = 0; i < ermakov.size(); ++i) {
    analytic_drift = std::max(
        analytic_drift, std::abs(propagate(profile, ermakov, ermakov.tau[i], initial).invariant - a0));
  }
  auto params = run_parameters(profile, cfg);
  params.erase("grid_n");
  params.erase("grid_l");
  params.erase("dt");
  params["samples"] = ermakov.size();
  out.push_back(make_result("invariant_drift_analytic", params, analytic_drift, 1e-9));
  return out;
}

std::vector<CheckResult> check_picture_equivalence(const MassProfile& profile,
                                                   const VerifyConfig& cfg) {
  const double start = grid_start(profile);
  GridWavefunction transformed =
      sample_gaussian(transformed_initial(profile, cfg.alpha), cfg.grid_n, cfg.grid_l);
  GridWavefunction original = apply_fourier_grid(transformed, FourierDirection::Forward);

  std::vector<CheckResult> out;
  double t = start;
  for (double next : checkpoints(start, cfg.times)) {
    if (!is_requested(next, cfg.times)) continue;
    transformed = evolve_transformed(transformed, profile, t, next, cfg.dt);
    original = evolve_original(original, profile, t, next, cfg.dt);
    t = next;
    const double f = fidelity(original, apply_fourier_grid(transformed, FourierDirection::Forward));
    auto params = run_parameters(profile, cfg);
    params["tau"] = t;
    params["fidelity"] = f;
    out.push_back(make_result("picture_equivalence", params, std::max(0.0, 1.0 - f), 1e-3));
  }
  return out;
}

CheckResult check_convergence(const MassProfile& profile, const VerifyConfig& cfg) {
  const double start = grid_start(profile);
  const double end = latest(cfg.times);
  const auto ermakov = reference_on(profile, start, end);
  const GaussianStated initial = transformed_initial(profile, cfg.alpha);
  const GridWavefunction psi0 = sample_gaussian(initial, cfg.grid_n, cfg.grid_l);
  const GridWavefunction exact =
      sample_gaussian(propagate(profile, ermakov, end, initial).state, cfg.grid_n, cfg.grid_l);

  const double coarse = trace_distance(exact, evolve_transformed(psi0, profile, start, end,
                                                                 cfg.convergence_dt));
  const double fine = trace_distance(exact, evolve_transformed(psi0, profile, start, end,
                                                               0.5 * cfg.convergence_dt));
  const double ratio = coarse / fine;

  auto params = run_parameters(profile, cfg);
  params.erase("dt");
  params["tau"] = end;
  params["dt_coarse"] = cfg.convergence_dt;
  params["dt_fine"] = 0.5 * cfg.convergence_dt;
  params["error_coarse"] = coarse;
  params["error_fine"] = fine;
  params["ratio"] = ratio;
  return make_result("convergence_order", params, std::abs(ratio - 4.0), 1.0);
}

std::vector<CheckResult> check_operator_identities(const VerifyConfig& cfg) {
  fock::CheckOptions opt;
  opt.dim = cfg.fock_dim;
  opt.sign = cfg.sign;
  const fock::Workspace ws(opt);

  std::vector<CheckResult> out;
  double bch_max = 0.0, sim_max = 0.0;
  for (auto [rho, rho_dot] : operator_check_grid()) {
    out.push_back(fock::check_bch(rho, rho_dot, ws));
    bch_max = std::max(bch_max, out.back().discrepancy);
    out.push_back(fock::check_invariant_similarity(rho, rho_dot, ws));
    sim_max = std::max(sim_max, out.back().discrepancy);
  }
  if (!cfg.dim_doubling) return out;

  fock::CheckOptions big = opt;
  big.dim = 2 * opt.dim;
  const fock::Workspace ws_big(big);
  double bch_big = 0.0, sim_big = 0.0;
  for (auto [rho, rho_dot] : operator_check_grid()) {
    bch_big = std::max(bch_big, fock::check_bch(rho, rho_dot, ws_big).discrepancy);
    sim_big = std::max(sim_big, fock::check_invariant_similarity(rho, rho_dot, ws_big).discrepancy);
  }

  // Doubling must not make things worse beyond rounding noise, and the larger
  // basis must still meet the identity's own tolerance.
  auto stability = [&](const char* name, double small, double large, double tol) {
    nlohmann::json params{{"dim", opt.dim},
                          {"doubled_dim", big.dim},
                          {"max_discrepancy", small},
                          {"max_discrepancy_doubled", large}};
    CheckResult r = make_result(name, params, large, std::min(tol, 10.0 * std::max(small, 1e-12)));
    r.trusted_block = big.trusted_block();
    return r;
  };
  out.push_back(stability("bch_dim_doubling", bch_max, bch_big, opt.bch_tolerance));
  out.push_back(stability("similarity_dim_doubling", sim_max, sim_big, opt.similarity_tolerance));
  if (cfg.sign == fock::ShearSign::MainText) {
    out[out.size() - 2].parameters["sign"] = "main_text";
  }
  return out;
}

std::vector<CheckResult> run_verification(const VerifyConfig& cfg) {
  std::vector<CheckResult> out;
  for (const auto& profile : cfg.profiles) {
    for (auto& r : check_grid_against_propagator(profile, cfg)) out.push_back(std::move(r));
    for (auto& r : check_picture_equivalence(profile, cfg)) out.push_back(std::move(r));
  }
  if (!cfg.profiles.empty()) out.push_back(check_convergence(cfg.profiles.front(), cfg));
  for (auto& r : check_operator_identities(cfg)) out.push_back(std::move(r));
  return out;
}

}  // namespace tdmass
