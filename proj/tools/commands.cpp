#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>

#include "tdmass/ermakov.hpp"
#include "tdmass/errors.hpp"
#include "tdmass/gaussian.hpp"
#include "tdmass/verify.hpp"

namespace tdmass::cli {

namespace {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

Eigen::VectorXd tau_grid(const RunConfig& cfg, const MassProfile& profile) {
  return Eigen::VectorXd::LinSpaced(cfg.samples, start_time(cfg, profile), cfg.tau_max);
}

// Runs fn over the profiles on worker threads; results come back in input
// order and failures name the profile they came from.
template <class Fn>
auto for_each_profile(const RunConfig& cfg, Fn fn) {
  using Result = decltype(fn(cfg.profiles.front()));
  std::vector<std::future<Result>> jobs;
  for (const auto& p : cfg.profiles) jobs.push_back(std::async(std::launch::async, fn, std::cref(p)));
  std::vector<Result> out;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    try {
      out.push_back(jobs[k].get());
    } catch (const std::exception& e) {
      for (auto& rest : jobs) {
        if (rest.valid()) rest.wait();
      }
      throw std::runtime_error(label(cfg.profiles[k]) + ": " + e.what());
    }
  }
  return out;
}

void write_rho_omega(std::ostream& os, const ErmakovSolution& sol) {
  const auto old = os.precision(17);
  os << "tau,rho,omega,theta\n";
  for (Eigen::Index i = 0; i < sol.size(); ++i) {
    os << sol.tau[i] << ',' << sol.rho[i] << ',' << 1.0 / (sol.rho[i] * sol.rho[i]) << ','
       << sol.theta[i] << '\n';
  }
  os.precision(old);
}

// Transformed-picture state at the first grid time. The original-picture
// coherent state |alpha> becomes F^dagger |alpha> = |i alpha>; when the run
// starts after the domain start it is carried there by the closed form.
GaussianStated initial_state(const RunConfig& cfg, const MassProfile& profile,
                             const ErmakovSolution& sol) {
  const std::complex<double> alpha_t{-cfg.alpha.imag(), cfg.alpha.real()};
  if (cfg.initial == InitialState::Invariant) {
    return invariant_coherent_state(alpha_t, sol.rho[0], sol.rho_dot[0]);
  }
  const GaussianStated at_origin = make_coherent(alpha_t);
  const double lo = domain(profile).lo;
  if (sol.tau[0] == lo || !has_closed_form(profile)) return at_origin;
  const int n = std::max(2, static_cast<int>(std::ceil((sol.tau[0] - lo) / 1e-3)) + 1);
  const auto lead = closed_form_solution(profile, Eigen::VectorXd::LinSpaced(n, lo, sol.tau[0]));
  return propagate(profile, lead, sol.tau[0], at_origin).state;
}

}  // namespace

int cmd_ermakov(const RunConfig& cfg) {
  validate(cfg);
  const auto lines = for_each_profile(cfg, [&](const MassProfile& p) {
    const auto sol = reference_solution(p, tau_grid(cfg, p));
    const std::string tag = label(p);
    auto a = open_output(cfg.out / ("rho_omega_" + tag + ".csv"));
    write_rho_omega(a, sol);
    auto b = open_output(cfg.out / ("ermakov_" + tag + ".csv"));
    write_csv(b, sol);
    const auto cps = find_critical_points(sol);
    return tag + ": " + std::to_string(sol.size()) + " samples, " + std::to_string(cps.size()) +
           " critical point(s)";
  });
  for (const auto& l : lines) std::cout << l << '\n';
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  validate(cfg);
  const auto runs = for_each_profile(cfg, [&](const MassProfile& p) {
    const auto sol = reference_solution(p, tau_grid(cfg, p));
    const GaussianStated initial = initial_state(cfg, p, sol);

    std::vector<PropagationReport> series;
    series.reserve(sol.size());
    double min_uncertainty = std::numeric_limits<double>::infinity();
    double max_uncertainty = 0.0;
    double invariant_drift = 0.0;
    for (Eigen::Index i = 0; i < sol.size(); ++i) {
      series.push_back(propagate(p, sol, sol.tau[i], initial));
      min_uncertainty = std::min(min_uncertainty, series.back().uncertainty);
      max_uncertainty = std::max(max_uncertainty, series.back().uncertainty);
      invariant_drift =
          std::max(invariant_drift, std::abs(series.back().invariant - series.front().invariant));
    }
    const std::string tag = label(p);
    auto os = open_output(cfg.out / ("evolution_" + tag + ".csv"));
    write_csv(os, series);

    json run{{"label", tag},
             {"profile", to_json(p)},
             {"tau_start", sol.tau[0]},
             {"tau_end", sol.tau[sol.size() - 1]},
             {"samples", sol.size()},
             {"alpha", {cfg.alpha.real(), cfg.alpha.imag()}},
             {"initial", cfg.initial == InitialState::Coherent ? "coherent" : "invariant"},
             {"min_uncertainty", min_uncertainty},
             {"max_uncertainty", max_uncertainty},
             {"max_invariant_drift", invariant_drift}};
    json tau_p = json::array(), rho_p = json::array(), r_p = json::array(), phi_p = json::array(),
         unc_p = json::array();
    for (const auto& cp : find_critical_points(sol)) {
      const auto rep = propagate(p, sol, cp.tau, initial);
      tau_p.push_back(cp.tau);
      rho_p.push_back(cp.rho);
      r_p.push_back(rep.r);
      phi_p.push_back(rep.phi);
      unc_p.push_back(rep.uncertainty);
    }
    run["tau_p"] = tau_p;
    run["rho_at_tau_p"] = rho_p;
    run["r_at_tau_p"] = r_p;
    run["phi_at_tau_p"] = phi_p;
    run["uncertainty_at_tau_p"] = unc_p;
    return run;
  });

  json summary{{"runs", runs}};
  auto os = open_output(cfg.out / "summary.json");
  os << summary.dump(2) << '\n';
  for (const auto& r : runs) {
    std::cout << r["label"].get<std::string>() << ": " << r["tau_p"].size()
              << " squeezing time(s), min uncertainty " << r["min_uncertainty"].get<double>()
              << '\n';
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  VerifyConfig vc;
  vc.alpha = cfg.alpha;
  vc.grid_n = cfg.grid_n;
  vc.grid_l = cfg.grid_l;
  vc.dt = cfg.dt;
  vc.fock_dim = cfg.fock_dim;
  vc.sign = cfg.bch_sign;
  vc.dim_doubling = cfg.dim_doubling;
  if (!cfg.profiles.empty()) vc.profiles = cfg.profiles;
  std::erase_if(vc.times, [&](double t) { return t > cfg.tau_max; });
  if (vc.times.empty()) throw ConfigError("tau_max leaves no verification times (0.5, 1, 2)");

  const auto results = run_verification(vc);
  bool all = true;
  json checks = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    checks.push_back(to_json(r));
    char line[160];
    std::snprintf(line, sizeof line, "%s %-26s discrepancy %.3e tolerance %.1e", r.pass ? "PASS" : "FAIL",
                  r.check.c_str(), r.discrepancy, r.tolerance);
    std::cout << line;
    if (r.parameters.contains("profile")) std::cout << "  " << label(profile_from_json(r.parameters["profile"]));
    if (r.parameters.contains("tau")) std::cout << " tau=" << r.parameters["tau"].get<double>();
    if (r.parameters.contains("rho")) {
      std::cout << " rho=" << r.parameters["rho"].get<double>()
                << " rho_dot=" << r.parameters["rho_dot"].get<double>();
    }
    std::cout << '\n';
  }
  auto os = open_output(cfg.out / "verify_report.json");
  os << json{{"pass", all}, {"checks", checks}}.dump(2) << '\n';
  std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? 0 : 1;
}

}  // namespace tdmass::cli
