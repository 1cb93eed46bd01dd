#pragma once

// Time-dependent mass profiles, expressed through the dimensionless product
// kappa*M(tau) with tau = kappa*t, plus the closed-form auxiliary solutions
// that exist for the hyperbolic and quadratic families.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tdmass {

/// kappa*M = cosh^2(beta*tau) / (2 beta^2)
struct Hyperbolic {
  double beta;
};

/// kappa*M = (gamma + 2 tau)^2
struct Quadratic {
  double gamma;
};

/// kappa*M sampled at strictly increasing times, interpolated with a
/// monotone (Fritsch-Carlson) cubic so that positivity of the samples carries
/// over to every interior point.
class Tabulated {
 public:
  explicit Tabulated(std::vector<std::pair<double, double>> samples);

  double operator()(double tau) const;

  double front() const { return tau_.front(); }
  double back() const { return tau_.back(); }
  const std::vector<double>& taus() const { return tau_; }
  const std::vector<double>& values() const { return value_; }

 private:
  std::vector<double> tau_;
  std::vector<double> value_;
  std::vector<double> slope_;
};

using MassProfile = std::variant<Hyperbolic, Quadratic, Tabulated>;

MassProfile make_hyperbolic(double beta);
MassProfile make_quadratic(double gamma);
MassProfile make_tabulated(std::vector<std::pair<double, double>> samples);
/// Tabulated profile with kappa*M = value on [tau_lo, tau_hi].
MassProfile make_constant(double value, double tau_lo, double tau_hi);

struct TauDomain {
  double lo;
  double hi;  // +inf for the analytic families
};

TauDomain domain(const MassProfile& profile);
/// Throws DomainError when tau lies outside the profile domain.
void check_domain(const MassProfile& profile, double tau);

bool has_closed_form(const MassProfile& profile);

/// Short human-readable tag, e.g. "hyperbolic_beta_0.5"; used for file names.
std::string label(const MassProfile& profile);

double eval_kappa_m(const MassProfile& profile, double tau);

/// Squared frequency of the transformed problem, 1 / (kappa*M).
inline double omega_squared(const MassProfile& profile, double tau) {
  return 1.0 / eval_kappa_m(profile, tau);
}

// Closed forms. All return std::nullopt for tabulated profiles.

/// Solution u of u'' + u/(kappa*M) = 0: tanh(beta*tau) or sqrt(gamma + 2 tau).
std::optional<double> analytic_u(const MassProfile& profile, double tau);
std::optional<double> analytic_u_dot(const MassProfile& profile, double tau);

/// Antiderivative S of 1/u^2 with the integration constant chosen so that
/// rho = u sqrt(1 + S^2) reproduces the closed forms
/// (beta*tau - coth(beta*tau))/beta and ln(gamma + 2 tau)/2.
std::optional<double> analytic_s(const MassProfile& profile, double tau);

/// Ermakov function rho. For the hyperbolic family this is evaluated as
/// sqrt(tanh^2 x + (x tanh x - 1)^2 / beta^2), x = beta*tau, which is the same
/// function written without the cancellation at small x; rho(0) = 1/beta.
std::optional<double> analytic_rho(const MassProfile& profile, double tau);
std::optional<double> analytic_rho_dot(const MassProfile& profile, double tau);

/// Phase Theta(tau) = integral_0^tau dtau'/rho^2, i.e. atan(S(tau)) - atan(S(0+)).
std::optional<double> analytic_theta(const MassProfile& profile, double tau);

/// Parses {"kind":"hyperbolic","beta":b} | {"kind":"quadratic","gamma":g} |
/// {"kind":"tabulated","samples":[[tau,kM],...]}.
MassProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MassProfile& profile);

}  // namespace tdmass
