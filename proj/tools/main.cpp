#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "tdmass/errors.hpp"

using namespace tdmass;
using namespace tdmass::cli;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> profile;
  std::optional<double> tau_min, tau_max, alpha_re, alpha_im, dt, grid_l;
  std::optional<int> samples, grid_n, fock_dim;
  std::optional<std::string> initial, bch_sign;
  bool no_doubling = false;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file; flags override its fields");
  app.add_option("--out", f.out, "Output directory (default .)");
  app.add_option("--profile", f.profile,
                 R"(Inline profile JSON, e.g. {"kind":"hyperbolic","beta":[0.2,0.5,1]})");
  app.add_option("--tau-min", f.tau_min, "First time (default: start of the profile domain)");
  app.add_option("--tau-max", f.tau_max, "Last time (default 10)");
  app.add_option("--samples", f.samples, "Number of time samples (default 1001)")->check(CLI::Range(2, 100000000));
  app.add_option("--alpha-re", f.alpha_re, "Re alpha of the initial coherent state (default 1)");
  app.add_option("--alpha-im", f.alpha_im, "Im alpha of the initial coherent state (default 0)");
  app.add_option("--dt", f.dt, "Split-step time step, at most 1e-3 (default 1e-4)");
  app.add_option("--grid-n", f.grid_n, "Grid points, a power of two (default 2048)");
  app.add_option("--grid-l", f.grid_l, "Grid extent L, q in [-L/2, L/2) (default 32)");
  app.add_option("--fock-dim", f.fock_dim, "Number-basis dimension (default 64)");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw ConfigError("cannot read config file " + f.config);
    std::stringstream buf;
    buf << is.rdbuf();
    try {
      apply_config(cfg, buf.str());
    } catch (const ConfigError& e) {
      const std::string where = e.line() ? ":" + std::to_string(*e.line()) : "";
      throw ConfigError(f.config + where + ": " + e.message());
    }
  }
  if (f.profile) {
    try {
      cfg.profiles = expand_profiles(nlohmann::json::parse(*f.profile));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--profile: ") + e.what());
    }
  }
  if (f.out) cfg.out = *f.out;
  if (f.tau_min) cfg.tau_min = *f.tau_min;
  if (f.tau_max) cfg.tau_max = *f.tau_max;
  if (f.samples) cfg.samples = *f.samples;
  if (f.alpha_re) cfg.alpha.real(*f.alpha_re);
  if (f.alpha_im) cfg.alpha.imag(*f.alpha_im);
  if (f.dt) cfg.dt = *f.dt;
  if (f.grid_n) cfg.grid_n = *f.grid_n;
  if (f.grid_l) cfg.grid_l = *f.grid_l;
  if (f.fock_dim) cfg.fock_dim = *f.fock_dim;
  if (f.initial) cfg.initial = *f.initial == "invariant" ? InitialState::Invariant : InitialState::Coherent;
  if (f.bch_sign) cfg.bch_sign = *f.bch_sign == "main_text" ? fock::ShearSign::MainText : fock::ShearSign::Appendix;
  if (f.no_doubling) cfg.dim_doubling = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent-mass oscillator: Ermakov functions, Gaussian propagation, checks"};
  app.require_subcommand(1);

  Flags flags;
  auto* ermakov = app.add_subcommand("ermakov", "Write rho, omega = 1/rho^2 and Theta for each profile");
  auto* evolve = app.add_subcommand("evolve", "Propagate a coherent state and summarize squeezing");
  auto* verify = app.add_subcommand("verify", "Run the numerical checks; exit code 0 iff all pass");
  for (auto* sub : {ermakov, evolve, verify}) add_flags(*sub, flags);
  evolve->add_option("--initial", flags.initial,
                     "coherent: |alpha> at the domain start; invariant: coherent state of the "
                     "invariant at tau-min (default coherent)")
      ->check(CLI::IsMember({"coherent", "invariant"}));
  verify->add_option("--bch-sign", flags.bch_sign,
                     "Sign of the q^2 term in the single-exponent form (default appendix)")
      ->check(CLI::IsMember({"appendix", "main_text"}));
  verify->add_flag("--no-dim-doubling", flags.no_doubling, "Skip the doubled-basis stability checks");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve(flags);
    if (ermakov->parsed()) return cmd_ermakov(cfg);
    if (evolve->parsed()) return cmd_evolve(cfg);
    return cmd_verify(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
