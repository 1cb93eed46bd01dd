#pragma once

#include <optional>
#include <string>

#include <json.hpp>

namespace tdmass {

/// Outcome of one numerical verification.
struct CheckResult {
  std::string check;
  nlohmann::json parameters = nlohmann::json::object();
  double discrepancy = 0.0;
  double tolerance = 0.0;
  std::optional<int> trusted_block;
  bool pass = false;
};

inline nlohmann::json to_json(const CheckResult& r) {
  nlohmann::json j{{"check", r.check},
                   {"parameters", r.parameters},
                   {"discrepancy", r.discrepancy},
                   {"tolerance", r.tolerance},
                   {"pass", r.pass}};
  j["trusted_block"] = r.trusted_block ? nlohmann::json(*r.trusted_block) : nlohmann::json(nullptr);
  return j;
}

}  // namespace tdmass
