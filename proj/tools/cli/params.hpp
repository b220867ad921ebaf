// Flat `key = value` parameter files.
//
//   # comment
//   n_levels = 4
//   omega_h  = 102.6
//
// Known keys only; anything else is an error carrying the line number.

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qhp/experiments.hpp"

namespace qhp::cli {

const std::vector<std::string>& known_keys();

class ParamSet {
 public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throws ConfigError naming the key when absent.
  double get(const std::string& key) const;
  double get_or(const std::string& key, double fallback) const;
  void set(const std::string& key, double value);
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

ParamSet parse_params(std::istream& in, const std::string& source = "<input>");
ParamSet load_params(const std::string& path);

// "key=value"; the key must be known.
void apply_override(ParamSet& params, const std::string& assignment);

// omega_c may be left out when `need_omega_c` is false (it is then set to
// half of omega_h so structural checks pass). Returns the strict validation
// warnings through `warnings`.
PumpConfig pump_config(const ParamSet& params, bool need_omega_c, std::vector<std::string>* warnings = nullptr);

// Starts from the built-in comparison defaults; any key present overrides.
// omega_w falls back to omega_h - omega_c when only those are given.
ComparisonParams comparison_params(const ParamSet& params);

}  // namespace qhp::cli
