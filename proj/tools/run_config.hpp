#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdmass/fock.hpp"
#include "tdmass/profiles.hpp"

namespace tdmass::cli {

enum class InitialState { Coherent, Invariant };

struct RunConfig {
  std::vector<MassProfile> profiles;
  std::optional<double> tau_min;  // default: start of the profile domain
  double tau_max = 10.0;
  int samples = 1001;
  std::complex<double> alpha{1.0, 0.0};
  InitialState initial = InitialState::Coherent;
  double dt = 1e-4;
  int grid_n = 2048;
  double grid_l = 32.0;
  int fock_dim = 64;
  bool dim_doubling = true;
  fock::ShearSign bch_sign = fock::ShearSign::Appendix;
  std::filesystem::path out = ".";
};

/// Configuration problem, with the 1-based line of the offending entry when known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::optional<int> line = std::nullopt);
  std::optional<int> line() const { return line_; }
  /// The message without the line prefix.
  const std::string& message() const { return message_; }

 private:
  std::optional<int> line_;
  std::string message_;
};

/// Expands array-valued "beta" or "gamma" into one profile per value.
std::vector<MassProfile> expand_profiles(const nlohmann::json& spec);

/// Applies the fields of a JSON config document. `text` is the raw document,
/// used to attach line numbers to errors.
void apply_config(RunConfig& cfg, const std::string& text);

/// Cross-field checks (sample count, time step, tau range inside every profile domain).
void validate(const RunConfig& cfg);

double start_time(const RunConfig& cfg, const MassProfile& profile);

}  // namespace tdmass::cli
