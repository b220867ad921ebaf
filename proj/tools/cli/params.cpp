#include "cli/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "qhp/errors.hpp"

namespace qhp::cli {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{"n_levels", "omega_h", "omega_c", "omega_w",   "T_w",
                                             "T_h",      "T_c",     "gamma_w", "gamma_h",   "gamma_c",
                                             "squeeze_db", "saturated_work", "g"};
  return keys;
}

double ParamSet::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing mandatory key '" + key + "'");
  return it->second;
}

double ParamSet::get_or(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void ParamSet::set(const std::string& key, double value) { values_[key] = value; }

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool is_known(const std::string& key) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// Returns an empty string on success, otherwise the reason.
std::string parse_value(const std::string& key, const std::string& text, double& out) {
  if (key == "saturated_work") {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "yes" || t == "1") {
      out = 1.0;
    } else if (t == "false" || t == "no" || t == "0") {
      out = 0.0;
    } else {
      return "expected true or false, got '" + text + "'";
    }
    return {};
  }
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || text.empty()) return "cannot parse '" + text + "' as a number";
  if (!std::isfinite(out)) return "value must be finite";
  if (key == "n_levels" && out != std::floor(out)) return "n_levels must be an integer";
  return {};
}

}  // namespace

ParamSet parse_params(std::istream& in, const std::string& source) {
  ParamSet params;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto where = [&] { return source + ":" + std::to_string(number) + ": "; };
    std::string body = line.substr(0, line.find('#'));
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string text = trim(std::string_view(body).substr(eq + 1));
    if (!is_known(key)) throw ConfigError(where() + "unknown key '" + key + "'");
    if (params.has(key)) throw ConfigError(where() + "duplicate key '" + key + "'");
    double value = 0.0;
    if (const std::string err = parse_value(key, text, value); !err.empty()) {
      throw ConfigError(where() + key + ": " + err);
    }
    params.set(key, value);
  }
  return params;
}

ParamSet load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file '" + path + "'");
  return parse_params(in, path);
}

void apply_override(ParamSet& params, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  const std::string text = trim(std::string_view(assignment).substr(eq + 1));
  if (!is_known(key)) throw ConfigError("override: unknown key '" + key + "'");
  double value = 0.0;
  if (const std::string err = parse_value(key, text, value); !err.empty()) {
    throw ConfigError("override " + key + ": " + err);
  }
  params.set(key, value);
}

PumpConfig pump_config(const ParamSet& p, bool need_omega_c, std::vector<std::string>* warnings) {
  PumpConfig cfg;
  cfg.n_levels = static_cast<int>(p.get("n_levels"));
  cfg.omega_h = p.get("omega_h");
  cfg.omega_c = need_omega_c ? p.get("omega_c") : p.get_or("omega_c", cfg.omega_h / 2);
  cfg.work = {Bath::work, p.get("T_w"), p.get("gamma_w")};
  cfg.hot = {Bath::hot, p.get("T_h"), p.get("gamma_h")};
  cfg.cold = {Bath::cold, p.get("T_c"), p.get("gamma_c")};
  const double db = p.get_or("squeeze_db", 0.0);
  if (db < 0.0) throw ConfigError("squeeze_db must be >= 0");
  cfg.work.squeeze_r = squeeze_db_to_r(db);
  cfg.work.saturated = p.get_or("saturated_work", 0.0) != 0.0;
  if (!need_omega_c && !p.has("omega_c")) {
    // Any interior point works for validation; the callers sweep omega_c.
    PumpConfig probe = cfg;
    validate_structure(probe);
    const double edge = effective_window_max(probe);
    if (edge > 0.0) cfg.omega_c = edge / 2;
  }
  std::vector<std::string> w = validate(cfg);
  if (warnings) *warnings = std::move(w);
  return cfg;
}

ComparisonParams comparison_params(const ParamSet& p) {
  ComparisonParams c;
  if (p.has("omega_w")) {
    c.omega_w = p.get("omega_w");
  } else if (p.has("omega_h") && p.has("omega_c")) {
    c.omega_w = p.get("omega_h") - p.get("omega_c");
  }
  c.work.temperature = p.get_or("T_w", c.work.temperature);
  c.hot.temperature = p.get_or("T_h", c.hot.temperature);
  c.cold.temperature = p.get_or("T_c", c.cold.temperature);
  c.work.gamma = p.get_or("gamma_w", c.work.gamma);
  c.hot.gamma = p.get_or("gamma_h", c.hot.gamma);
  c.cold.gamma = p.get_or("gamma_c", c.cold.gamma);
  c.g = p.get_or("g", c.g);
  c.ideal_levels = static_cast<int>(p.get_or("n_levels", c.ideal_levels));
  if (p.get_or("squeeze_db", 0.0) != 0.0 || p.get_or("saturated_work", 0.0) != 0.0) {
    throw ConfigError("the three-qubit comparison takes plain thermal baths only");
  }
  return c;
}

}  // namespace qhp::cli
