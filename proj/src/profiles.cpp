#include "tdmass/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tdmass/errors.hpp"

namespace tdmass {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Fritsch-Carlson derivative estimate for one interior node.
double interior_slope(double h0, double h1, double d0, double d1) {
  if (d0 * d1 <= 0.0) return 0.0;
  const double w1 = 2.0 * h1 + h0;
  const double w2 = h1 + 2.0 * h0;
  return (w1 + w2) / (w1 / d0 + w2 / d1);
}

// One-sided three-point estimate, clipped to keep the end interval monotone.
double end_slope(double h0, double h1, double d0, double d1) {
  double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (d * d0 <= 0.0) return 0.0;
  if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return d;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Tabulated::Tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) {
    throw DomainError("tabulated profile needs at least two samples");
  }
  tau_.reserve(samples.size());
  value_.reserve(samples.size());
  for (const auto& [t, v] : samples) {
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw DomainError("tabulated profile samples must be finite");
    }
    if (v <= 0.0) throw DomainError("tabulated kappa*M must be positive");
    if (!tau_.empty() && t <= tau_.back()) {
      throw DomainError("tabulated tau samples must be strictly increasing");
    }
    tau_.push_back(t);
    value_.push_back(v);
  }

  const std::size_t n = tau_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = tau_[k + 1] - tau_[k];
    delta[k] = (value_[k + 1] - value_[k]) / h[k];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    slope_[k] = interior_slope(h[k - 1], h[k], delta[k - 1], delta[k]);
  }
  slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Tabulated::operator()(double tau) const {
  if (!(tau >= tau_.front() && tau <= tau_.back())) {
    throw DomainError("tau = " + format_number(tau) + " outside tabulated range [" +
                      format_number(tau_.front()) + ", " + format_number(tau_.back()) + "]");
  }
  auto it = std::lower_bound(tau_.begin(), tau_.end(), tau);
  std::size_t k = static_cast<std::size_t>(it - tau_.begin());
  if (it != tau_.end() && *it == tau) return value_[k];
  k -= 1;

  const double h = tau_[k + 1] - tau_[k];
  const double t = (tau - tau_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * value_[k] + h10 * h * slope_[k] + h01 * value_[k + 1] +
         h11 * h * slope_[k + 1];
}

MassProfile make_hyperbolic(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("hyperbolic profile requires beta > 0");
  return Hyperbolic{beta};
}

MassProfile make_quadratic(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("quadratic profile requires gamma > 0");
  return Quadratic{gamma};
}

MassProfile make_tabulated(std::vector<std::pair<double, double>> samples) {
  return Tabulated(std::move(samples));
}

MassProfile make_constant(double value, double tau_lo, double tau_hi) {
  return Tabulated({{tau_lo, value}, {tau_hi, value}});
}

TauDomain domain(const MassProfile& profile) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(overloaded{[](const Hyperbolic&) { return TauDomain{0.0, inf}; },
                               [](const Quadratic&) { return TauDomain{0.0, inf}; },
                               [](const Tabulated& t) { return TauDomain{t.front(), t.back()}; }},
                    profile);
}

void check_domain(const MassProfile& profile, double tau) {
  const TauDomain d = domain(profile);
  if (!(tau >= d.lo && tau <= d.hi)) {
    throw DomainError("tau = " + format_number(tau) + " outside the domain of profile " +
                      label(profile));
  }
}

bool has_closed_form(const MassProfile& profile) {
  return !std::holds_alternative<Tabulated>(profile);
}

std::string label(const MassProfile& profile) {
  return std::visit(
      overloaded{[](const Hyperbolic& h) { return "hyperbolic_beta_" + format_number(h.beta); },
                 [](const Quadratic& q) { return "quadratic_gamma_" + format_number(q.gamma); },
                 [](const Tabulated& t) {
                   return "tabulated_" + std::to_string(t.taus().size()) + "_samples";
                 }},
      profile);
}

double eval_kappa_m(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) {
                                 const double c = std::cosh(h.beta * tau);
                                 return c * c / (2.0 * h.beta * h.beta);
                               },
                               [tau](const Quadratic& q) {
                                 const double x = q.gamma + 2.0 * tau;
                                 return x * x;
                               },
                               [tau](const Tabulated& t) { return t(tau); }},
                    profile);
}

std::optional<double> analytic_u(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(
      overloaded{[tau](const Hyperbolic& h) -> std::optional<double> { return std::tanh(h.beta * tau); },
                 [tau](const Quadratic& q) -> std::optional<double> {
                   return std::sqrt(q.gamma + 2.0 * tau);
                 },
                 [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
      profile);
}

std::optional<double> analytic_u_dot(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) -> std::optional<double> {
                                 const double c = std::cosh(h.beta * tau);
                                 return h.beta / (c * c);
                               },
                               [tau](const Quadratic& q) -> std::optional<double> {
                                 return 1.0 / std::sqrt(q.gamma + 2.0 * tau);
                               },
                               [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
                    profile);
}

std::optional<double> analytic_s(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) -> std::optional<double> {
                                 const double x = h.beta * tau;
                                 if (x == 0.0) return -std::numeric_limits<double>::infinity();
                                 return (x - 1.0 / std::tanh(x)) / h.beta;
                               },
                               [tau](const Quadratic& q) -> std::optional<double> {
                                 return 0.5 * std::log(q.gamma + 2.0 * tau);
                               },
                               [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
                    profile);
}

std::optional<double> analytic_rho(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) -> std::optional<double> {
                                 const double x = h.beta * tau;
                                 const double th = std::tanh(x);
                                 const double w = (x * th - 1.0) / h.beta;
                                 return std::sqrt(th * th + w * w);
                               },
                               [tau](const Quadratic& q) -> std::optional<double> {
                                 const double x = q.gamma + 2.0 * tau;
                                 const double l = std::log(x);
                                 return std::sqrt(x * (1.0 + 0.25 * l * l));
                               },
                               [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
                    profile);
}

std::optional<double> analytic_rho_dot(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) -> std::optional<double> {
                                 const double x = h.beta * tau;
                                 const double th = std::tanh(x);
                                 const double sech2 = 1.0 - th * th;
                                 const double w = x * th - 1.0;
                                 const double rho_sq = th * th + w * w / (h.beta * h.beta);
                                 // d(rho^2)/dtau / 2
                                 const double half =
                                     h.beta * (th * sech2 + w * (th + x * sech2) / (h.beta * h.beta));
                                 return half / std::sqrt(rho_sq);
                               },
                               [tau](const Quadratic& q) -> std::optional<double> {
                                 // rho^2 = x (1 + l^2/4), d(rho^2)/dx = 1 + l/2 + l^2/4
                                 const double x = q.gamma + 2.0 * tau;
                                 const double l = std::log(x);
                                 const double rho = std::sqrt(x * (1.0 + 0.25 * l * l));
                                 return (1.0 + 0.5 * l + 0.25 * l * l) / rho;
                               },
                               [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
                    profile);
}

std::optional<double> analytic_theta(const MassProfile& profile, double tau) {
  check_domain(profile, tau);
  return std::visit(overloaded{[tau](const Hyperbolic& h) -> std::optional<double> {
                                 // atan(S) + pi/2 with S(0+) = -inf, written as one atan2
                                 // that is regular at tau = 0.
                                 const double x = h.beta * tau;
                                 const double th = std::tanh(x);
                                 return std::atan2(h.beta * th, 1.0 - x * th);
                               },
                               [tau](const Quadratic& q) -> std::optional<double> {
                                 return std::atan(0.5 * std::log(q.gamma + 2.0 * tau)) -
                                        std::atan(0.5 * std::log(q.gamma));
                               },
                               [](const Tabulated&) -> std::optional<double> { return std::nullopt; }},
                    profile);
}

MassProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw DomainError("profile spec must be an object with a \"kind\" field");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "hyperbolic") return make_hyperbolic(j.at("beta").get<double>());
  if (kind == "quadratic") return make_quadratic(j.at("gamma").get<double>());
  if (kind == "tabulated") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : j.at("samples")) {
      if (!row.is_array() || row.size() != 2) {
        throw DomainError("tabulated samples must be [tau, kappa_m] pairs");
      }
      samples.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return make_tabulated(std::move(samples));
  }
  throw DomainError("unknown profile kind \"" + kind + "\"");
}

nlohmann::json to_json(const MassProfile& profile) {
  return std::visit(overloaded{[](const Hyperbolic& h) {
                                 return nlohmann::json{{"kind", "hyperbolic"}, {"beta", h.beta}};
                               },
                               [](const Quadratic& q) {
                                 return nlohmann::json{{"kind", "quadratic"}, {"gamma", q.gamma}};
                               },
                               [](const Tabulated& t) {
                                 nlohmann::json samples = nlohmann::json::array();
                                 for (std::size_t k = 0; k < t.taus().size(); ++k) {
                                   samples.push_back({t.taus()[k], t.values()[k]});
                                 }
                                 return nlohmann::json{{"kind", "tabulated"}, {"samples", samples}};
                               }},
                    profile);
}

}  // namespace tdmass
