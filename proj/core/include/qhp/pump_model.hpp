// pump_model.hpp: N-level ideal absorption heat pump: level scheme, jump
// operators, bath rates and the closed-form thermodynamic bounds.
//
// Natural units throughout (hbar = k_B = 1). Levels are 0-based in code:
// level k here is |k+1> in the usual 1-based ket labelling.

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qhp/matrix_core.hpp"

namespace qhp {

enum class Bath { work, hot, cold };

inline constexpr std::array<Bath, 3> kAllBaths{Bath::work, Bath::hot, Bath::cold};

std::string_view to_string(Bath bath) noexcept;

// Occupation used in place of n(omega) for a saturated (T -> infinity) bath.
inline constexpr double kSaturatedOccupation = 1e8;

// gamma_alpha <= kWeakCouplingRatio * min(omega_c, omega_w, T_c) before a
// weak-coupling warning is raised.
inline constexpr double kWeakCouplingRatio = 1e-2;

struct BathSpec {
  Bath label = Bath::work;
  double temperature = 1.0;
  double gamma = 1e-3;
  double squeeze_r = 0.0;  // work bath only
  bool saturated = false;  // work bath only
};

struct Temperatures {
  double work = 0.0;
  double hot = 0.0;
  double cold = 0.0;
};

struct PumpConfig {
  int n_levels = 3;
  double omega_h = 0.0;
  double omega_c = 0.0;
  BathSpec work{Bath::work};
  BathSpec hot{Bath::hot};
  BathSpec cold{Bath::cold};

  double omega_w() const { return omega_h - omega_c; }
  double frequency(Bath bath) const;
  const BathSpec& bath(Bath label) const;
  BathSpec& bath(Bath label);
  Temperatures temperatures() const { return {work.temperature, hot.temperature, cold.temperature}; }
};

// Emission (down) and absorption (up) rates of one transition.
struct RatePair {
  double down = 0.0;
  double up = 0.0;
};

// Upper and lower level of one transition, 0-based.
struct Transition {
  Index lower = 0;
  Index upper = 0;
};

void validate(const BathSpec& bath);

// Structural checks every solver needs: N >= 3, 0 < omega_c < omega_h,
// positive temperatures and rates, labels in the right slots. Throws
// ConfigError.
void validate_structure(const PumpConfig& cfg);

// Full invariant check, including T_w > T_h > T_c (work ordering skipped when
// saturated). Returns weak-coupling warnings; throws ConfigError on violations.
std::vector<std::string> validate(const PumpConfig& cfg);

CMatrix build_hamiltonian(const PumpConfig& cfg);

// Transitions a bath drives, in increasing order of the lower level:
//   work: (2n, 2n+1), n = 1 .. ceil(N/2)-1
//   hot:  (n, n+2),   n = 1 .. N-2
//   cold: (2n-1, 2n), n = 1 .. floor(N/2)
// (1-based labels; the returned indices are 0-based.)
std::vector<Transition> transitions(int n_levels, Bath bath);

// Lowering operator sum_k |lower_k><upper_k|. Every element is checked to
// connect levels whose gap is exactly the bath frequency.
CMatrix build_jump_operator(const PumpConfig& cfg, Bath bath);

// 1 / (exp(omega / T) - 1); std::domain_error unless omega > 0 and T > 0.
double bose_occupation(double omega, double temperature);

// n(omega) for plain baths, n cosh 2r + sinh^2 r when squeezed, the cap when
// saturated.
double effective_occupation(const BathSpec& bath, double omega);

// down = gamma omega^3 (1 + n_eff), up = gamma omega^3 n_eff
RatePair decay_rates(const BathSpec& bath, double omega);

// Temperature of the thermal bath with the same occupation at omega.
double effective_temperature(const BathSpec& bath, double omega);

double squeeze_db_to_r(double db);

// omega_h (T_w - T_h) T_c / ((T_w - T_c) T_h). Requires T_w >= T_h > T_c > 0;
// T_w may be +infinity.
double cooling_window_max(double omega_h, const Temperatures& temps);

// (T_w - T_h) T_c / ((T_h - T_c) T_w), same preconditions.
double carnot_cop(const Temperatures& temps);

// Temperatures with the work bath replaced by its effective temperature at
// the work frequency of cfg.
Temperatures effective_temperatures(const PumpConfig& cfg);

// Upper edge of the cooling window for fixed omega_h. For squeezed or
// saturated work baths the effective work temperature depends on
// omega_w = omega_h - omega_c, so the edge is the fixed point of
// omega_c -> cooling_window_max(omega_h, T_eff(omega_h - omega_c)).
double effective_window_max(const PumpConfig& cfg);

}  // namespace qhp
