// nonideal_fridge.hpp: three-qubit absorption refrigerator (eight levels).
//
// Qubit order is (c, w, h); basis index 4*c + 2*w + h with 1 = excited.
// The coupling g (|110><001| + h.c.) trades a cold and a work quantum for a
// hot one.

#pragma once

#include <string>
#include <vector>

#include "qhp/pump_model.hpp"
#include "qhp/steady_state.hpp"

namespace qhp {

// local: each bath damps its own qubit through the bare sigma^- at the bare
// frequency. dressed: each bath couples through sigma^x of its qubit,
// resolved into eigen-transitions of the full Hamiltonian (one jump per
// positive Bohr frequency).
enum class DissipatorBasis { local, dressed };

std::string_view to_string(DissipatorBasis basis) noexcept;

// Warn once g exceeds this fraction of min(omega_c, omega_w).
inline constexpr double kThreeBodyCouplingRatio = 0.1;

struct ThreeQubitConfig {
  double omega_c = 0.0;
  double omega_w = 0.0;
  double g = 0.0;
  BathSpec work{Bath::work};
  BathSpec hot{Bath::hot};
  BathSpec cold{Bath::cold};
  DissipatorBasis basis = DissipatorBasis::local;

  double omega_h() const { return omega_c + omega_w; }
  double frequency(Bath b) const;
  const BathSpec& bath(Bath label) const;
  Temperatures temperatures() const { return {work.temperature, hot.temperature, cold.temperature}; }
};

// Positive frequencies, g >= 0, positive temperatures, plain (unsqueezed)
// baths in the right slots. Throws ConfigError.
void validate_structure(const ThreeQubitConfig& cfg);

// Adds g > 0, gamma > 0 and T_w > T_h > T_c. Returns coupling warnings.
std::vector<std::string> validate(const ThreeQubitConfig& cfg);

CMatrix build_three_qubit_hamiltonian(const ThreeQubitConfig& cfg);

// The qubit a bath is attached to: cold -> 0, work -> 1, hot -> 2.
int qubit_of(Bath b) noexcept;

// op acting on one qubit, identity on the others.
CMatrix embed_qubit_operator(const CMatrix& op, int qubit);

GeneratorParts build_three_qubit_parts(const ThreeQubitConfig& cfg);

SteadySolution solve_three_qubit(const ThreeQubitConfig& cfg, const Tolerances& tol = {});

}  // namespace qhp
