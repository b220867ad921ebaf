#include "qhp/pump_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qhp/errors.hpp"

namespace qhp {

std::string_view to_string(Bath bath) noexcept {
  switch (bath) {
    case Bath::work: return "work";
    case Bath::hot: return "hot";
    case Bath::cold: return "cold";
  }
  return "?";
}

double PumpConfig::frequency(Bath b) const {
  switch (b) {
    case Bath::work: return omega_w();
    case Bath::hot: return omega_h;
    case Bath::cold: return omega_c;
  }
  return 0.0;
}

const BathSpec& PumpConfig::bath(Bath label) const {
  switch (label) {
    case Bath::work: return work;
    case Bath::hot: return hot;
    case Bath::cold: return cold;
  }
  return work;
}

BathSpec& PumpConfig::bath(Bath label) {
  return const_cast<BathSpec&>(static_cast<const PumpConfig&>(*this).bath(label));
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

std::string name(const BathSpec& b) { return std::string(to_string(b.label)); }

}  // namespace

void validate(const BathSpec& b) {
  if (!(b.gamma >= 0.0) || !std::isfinite(b.gamma)) fail(name(b) + " bath: gamma must be finite and >= 0");
  if (!b.saturated && !(b.temperature > 0.0)) fail(name(b) + " bath: temperature must be > 0");
  if (!(b.squeeze_r >= 0.0) || !std::isfinite(b.squeeze_r)) fail(name(b) + " bath: squeeze_r must be >= 0");
  if (b.label != Bath::work && (b.squeeze_r != 0.0 || b.saturated)) {
    fail(name(b) + " bath: squeezing and saturation apply to the work bath only");
  }
}

void validate_structure(const PumpConfig& cfg) {
  if (cfg.n_levels < 3) fail("n_levels must be >= 3");
  if (!(cfg.omega_c > 0.0)) fail("omega_c must be > 0");
  if (!(cfg.omega_h > cfg.omega_c)) fail("omega_c must be < omega_h");
  if (!std::isfinite(cfg.omega_h)) fail("omega_h must be finite");
  for (Bath label : kAllBaths) {
    const BathSpec& b = cfg.bath(label);
    if (b.label != label) fail("bath in the " + std::string(to_string(label)) + " slot is labelled " + name(b));
    validate(b);
  }
}

std::vector<std::string> validate(const PumpConfig& cfg) {
  validate_structure(cfg);
  for (Bath label : kAllBaths) {
    if (!(cfg.bath(label).gamma > 0.0)) fail(std::string(to_string(label)) + " bath: gamma must be > 0");
  }
  if (!cfg.work.saturated && !(cfg.work.temperature > cfg.hot.temperature)) fail("require T_w > T_h");
  if (!(cfg.hot.temperature > cfg.cold.temperature)) fail("require T_h > T_c");

  std::vector<std::string> warnings;
  const double scale = std::min({cfg.omega_c, cfg.omega_w(), cfg.cold.temperature});
  for (Bath label : kAllBaths) {
    const double gamma = cfg.bath(label).gamma;
    if (gamma > kWeakCouplingRatio * scale) {
      std::ostringstream os;
      os << to_string(label) << " bath: gamma = " << gamma << " exceeds " << kWeakCouplingRatio
         << " * min(omega_c, omega_w, T_c) = " << kWeakCouplingRatio * scale
         << "; weak-coupling treatment is questionable";
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

namespace {

// 0-based level k is ket |k+1>: |1> = 0, |2n> = (n-1) w_h + w_c, |2n+1> = n w_h.
double level_energy(Index k, double omega_h, double omega_c) {
  const Index ket = k + 1;
  if (ket == 1) return 0.0;
  const Index n = ket / 2;
  if (ket % 2 == 0) return static_cast<double>(n - 1) * omega_h + omega_c;
  return static_cast<double>(n) * omega_h;
}

}  // namespace

CMatrix build_hamiltonian(const PumpConfig& cfg) {
  validate_structure(cfg);
  const Index n = cfg.n_levels;
  CMatrix h = CMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) h(k, k) = level_energy(k, cfg.omega_h, cfg.omega_c);
  return h;
}

std::vector<Transition> transitions(int n_levels, Bath bath) {
  std::vector<Transition> out;
  const int n = n_levels;
  switch (bath) {
    case Bath::work:
      for (int k = 1; k <= (n + 1) / 2 - 1; ++k) out.push_back({2 * k - 1, 2 * k});
      break;
    case Bath::hot:
      for (int k = 1; k <= n - 2; ++k) out.push_back({k - 1, k + 1});
      break;
    case Bath::cold:
      for (int k = 1; k <= n / 2; ++k) out.push_back({2 * k - 2, 2 * k - 1});
      break;
  }
  return out;
}

CMatrix build_jump_operator(const PumpConfig& cfg, Bath bath) {
  validate_structure(cfg);
  const Index n = cfg.n_levels;
  const double omega = cfg.frequency(bath);
  CMatrix jump = CMatrix::Zero(n, n);
  for (const Transition& t : transitions(cfg.n_levels, bath)) {
    const double gap = level_energy(t.upper, cfg.omega_h, cfg.omega_c) -
                       level_energy(t.lower, cfg.omega_h, cfg.omega_c);
    // Energies are sums of omega_h and omega_c with integer weights; the gap
    // may differ from omega by one rounding of the larger energy.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, level_energy(t.upper, cfg.omega_h, cfg.omega_c));
    if (std::abs(gap - omega) > slack) {
      throw std::logic_error("jump operator element does not match the bath frequency");
    }
    jump(t.lower, t.upper) = 1.0;
  }
  return jump;
}

double bose_occupation(double omega, double temperature) {
  if (!(omega > 0.0) || !(temperature > 0.0)) {
    throw std::domain_error("bose_occupation: omega and temperature must be > 0");
  }
  if (std::isinf(temperature)) return std::numeric_limits<double>::infinity();
  return 1.0 / std::expm1(omega / temperature);
}

double effective_occupation(const BathSpec& bath, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("effective_occupation: omega must be > 0");
  if (bath.saturated) return kSaturatedOccupation;
  const double n = bose_occupation(omega, bath.temperature);
  if (bath.squeeze_r == 0.0) return n;
  const double s = std::sinh(bath.squeeze_r);
  return n * std::cosh(2.0 * bath.squeeze_r) + s * s;
}

RatePair decay_rates(const BathSpec& bath, double omega) {
  if (!(omega > 0.0)) throw std::domain_error("decay_rates: omega must be > 0");
  const double n = effective_occupation(bath, omega);
  const double base = bath.gamma * omega * omega * omega;
  return {base * (1.0 + n), base * n};
}

double effective_temperature(const BathSpec& bath, double omega) {
  const double n = effective_occupation(bath, omega);
  if (std::isinf(n)) return n;
  return omega / std::log1p(1.0 / n);
}

double squeeze_db_to_r(double db) {
  if (!(db >= 0.0)) throw std::domain_error("squeeze_db_to_r: decibels must be >= 0");
  return db / 20.0 * std::log(10.0);
}

namespace {

void check_ordering(const Temperatures& t) {
  if (!(t.cold > 0.0)) fail("require T_c > 0");
  if (!(t.hot > t.cold)) fail("require T_h > T_c");
  if (!(t.work >= t.hot)) fail("require T_w >= T_h");
}

}  // namespace

double cooling_window_max(double omega_h, const Temperatures& t) {
  check_ordering(t);
  if (std::isinf(t.work)) return omega_h * t.cold / t.hot;
  return omega_h * (t.work - t.hot) * t.cold / ((t.work - t.cold) * t.hot);
}

double carnot_cop(const Temperatures& t) {
  check_ordering(t);
  if (std::isinf(t.work)) return t.cold / (t.hot - t.cold);
  return (t.work - t.hot) * t.cold / ((t.hot - t.cold) * t.work);
}

Temperatures effective_temperatures(const PumpConfig& cfg) {
  Temperatures t = cfg.temperatures();
  t.work = effective_temperature(cfg.work, cfg.omega_w());
  return t;
}

double effective_window_max(const PumpConfig& cfg) {
  Temperatures t = cfg.temperatures();
  if (!cfg.work.saturated && cfg.work.squeeze_r == 0.0) return cooling_window_max(cfg.omega_h, t);

  // T_eff varies slowly with omega_w, so the map contracts quickly.
  double edge = cfg.omega_h * t.cold / t.hot;
  for (int it = 0; it < 100; ++it) {
    t.work = effective_temperature(cfg.work, cfg.omega_h - edge);
    const double next = cooling_window_max(cfg.omega_h, t);
    const bool settled = std::abs(next - edge) <= 1e-15 * cfg.omega_h;
    edge = next;
    if (settled) break;
  }
  return edge;
}

}  // namespace qhp
