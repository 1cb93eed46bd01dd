#include "run_config.hpp"

#include <algorithm>
#include <cmath>

#include "tdmass/errors.hpp"

namespace tdmass::cli {

namespace {

using nlohmann::json;

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

// Line of the first occurrence of "key": in the document.
std::optional<int> line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return std::nullopt;
  return line_at(text, pos);
}

template <class T>
T field(const json& j, const std::string& key, const std::string& text) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field \"" + key + "\": " + e.what(), line_of_key(text, key));
  }
}

std::string describe(std::optional<int> line, const std::string& what) {
  return line ? "line " + std::to_string(*line) + ": " + what : what;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::optional<int> line)
    : std::runtime_error(describe(line, what)), line_(line), message_(what) {}

std::vector<MassProfile> expand_profiles(const json& spec) {
  if (!spec.is_object()) throw DomainError("profile spec must be a JSON object");
  for (const char* key : {"beta", "gamma"}) {
    if (spec.contains(key) && spec.at(key).is_array()) {
      std::vector<MassProfile> out;
      for (const auto& v : spec.at(key)) {
        json single = spec;
        single[key] = v;
        out.push_back(profile_from_json(single));
      }
      if (out.empty()) throw DomainError(std::string("empty \"") + key + "\" list");
      return out;
    }
  }
  return {profile_from_json(spec)};
}

void apply_config(RunConfig& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_at(text, e.byte));
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object", 1);

  static const std::vector<std::string> known{
      "profile", "tau_min",  "tau_max",  "samples",      "alpha_re", "alpha_im", "initial",
      "dt",      "grid_n",   "grid_l",   "fock_dim",     "bch_sign", "out",      "dim_doubling"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown field \"" + key + "\"", line_of_key(text, key));
    }
  }

  if (j.contains("profile")) {
    try {
      cfg.profiles = expand_profiles(j.at("profile"));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("profile: ") + e.what(), line_of_key(text, "profile"));
    }
  }
  if (j.contains("tau_min")) cfg.tau_min = field<double>(j, "tau_min", text);
  if (j.contains("tau_max")) cfg.tau_max = field<double>(j, "tau_max", text);
  if (j.contains("samples")) cfg.samples = field<int>(j, "samples", text);
  if (j.contains("alpha_re")) cfg.alpha.real(field<double>(j, "alpha_re", text));
  if (j.contains("alpha_im")) cfg.alpha.imag(field<double>(j, "alpha_im", text));
  if (j.contains("dt")) cfg.dt = field<double>(j, "dt", text);
  if (j.contains("grid_n")) cfg.grid_n = field<int>(j, "grid_n", text);
  if (j.contains("grid_l")) cfg.grid_l = field<double>(j, "grid_l", text);
  if (j.contains("fock_dim")) cfg.fock_dim = field<int>(j, "fock_dim", text);
  if (j.contains("dim_doubling")) cfg.dim_doubling = field<bool>(j, "dim_doubling", text);
  if (j.contains("out")) cfg.out = field<std::string>(j, "out", text);
  if (j.contains("initial")) {
    const auto v = field<std::string>(j, "initial", text);
    if (v == "coherent") {
      cfg.initial = InitialState::Coherent;
    } else if (v == "invariant") {
      cfg.initial = InitialState::Invariant;
    } else {
      throw ConfigError("initial must be \"coherent\" or \"invariant\"", line_of_key(text, "initial"));
    }
  }
  if (j.contains("bch_sign")) {
    const auto v = field<std::string>(j, "bch_sign", text);
    if (v == "appendix") {
      cfg.bch_sign = fock::ShearSign::Appendix;
    } else if (v == "main_text") {
      cfg.bch_sign = fock::ShearSign::MainText;
    } else {
      throw ConfigError("bch_sign must be \"appendix\" or \"main_text\"",
                        line_of_key(text, "bch_sign"));
    }
  }
}

double start_time(const RunConfig& cfg, const MassProfile& profile) {
  return cfg.tau_min.value_or(domain(profile).lo);
}

void validate(const RunConfig& cfg) {
  if (cfg.profiles.empty()) throw ConfigError("no profile given (use --profile or a config file)");
  if (cfg.samples < 2) throw ConfigError("samples must be >= 2");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (cfg.grid_n < 8 || (cfg.grid_n & (cfg.grid_n - 1)) != 0) {
    throw ConfigError("grid_n must be a power of two >= 8");
  }
  if (!(cfg.grid_l > 0.0)) throw ConfigError("grid_l must be positive");
  if (cfg.fock_dim < 24) throw ConfigError("fock_dim must be >= 24");
  for (const auto& p : cfg.profiles) {
    const double lo = start_time(cfg, p);
    const auto dom = domain(p);
    if (lo < dom.lo || cfg.tau_max > dom.hi || !(cfg.tau_max > lo)) {
      throw ConfigError("tau range [" + std::to_string(lo) + ", " + std::to_string(cfg.tau_max) +
                        "] is not inside the domain of " + label(p));
    }
  }
}

}  // namespace tdmass::cli
