// steady_state.hpp: Lindblad generator of the N-level pump, its stationary
// state, heat currents and thermodynamic diagnostics.
//
// Sign convention: a heat current is positive when energy flows from the
// bath into the system. Chiller mode has q_cold > 0, q_work > 0, q_hot < 0.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "qhp/matrix_core.hpp"
#include "qhp/pump_model.hpp"

namespace qhp {

struct Tolerances {
  double kernel_residual = 1e-10;  // ||L v|| / ||L||
  double first_law = 1e-10;        // |sum q| / max |q|
  double ideality = 1e-8;          // relative deviation of |q_c/q_w| from omega_c/omega_w
  double entropy_floor = 1e-12;    // smallest accepted entropy production
  double degeneracy_ratio = 1e-9;  // singular-value cut in the kernel fallback
};

enum class OperatingMode { chiller, heat_transformer, boundary, equilibrium, other };

std::string_view to_string(OperatingMode mode) noexcept;

struct HeatCurrents {
  double work = 0.0;
  double hot = 0.0;
  double cold = 0.0;

  double operator[](Bath b) const;
  double sum() const { return work + hot + cold; }
  double max_abs() const;
};

struct SteadySolution {
  CMatrix rho;
  HeatCurrents q;
  double cop = 0.0;           // q.cold / q.work
  double entropy_rate = 0.0;  // -(q_w/T_w + q_h/T_h + q_c/T_c), effective T_w
  OperatingMode mode = OperatingMode::other;
  // first_law, kernel_residual, ideality_cold_work (relative values)
  std::map<std::string, double> residuals;
};

// The generator split by origin. The parts are exact in extended precision,
// so the stationary state of total() is also stationary for the sum used
// when evaluating currents.
struct GeneratorParts {
  CMatrix hamiltonian;
  SuperOp unitary;  // -i[H, .]
  SuperOp work;
  SuperOp hot;
  SuperOp cold;

  const SuperOp& dissipator(Bath b) const;
  SuperOp total() const;
};

// Gamma_down (J rho J^+ - {J^+ J, rho}/2) + Gamma_up (J^+ rho J - {J J^+, rho}/2)
SuperOp build_dissipator(const CMatrix& jump, const RatePair& rates);

GeneratorParts build_generator_parts(const PumpConfig& cfg);

// -i[H_N, .] + L_w + L_h + L_c
SuperOp build_liouvillian(const PumpConfig& cfg);

// Stationary state and currents of an arbitrary generator split into parts.
// `temps` are the (effective) bath temperatures used for entropy production.
// Throws SolverError{not_converged} when the kernel residual or first-law
// residual exceeds tolerance.
SteadySolution solve_generator(const GeneratorParts& parts, const Temperatures& temps,
                               const Tolerances& tol = {});

SteadySolution solve(const PumpConfig& cfg, const Tolerances& tol = {});

// One term of the per-level current formulas, e.g. the cold current is
// omega_c * sum_n <2n| L_c rho |2n>.
struct CurrentTerm {
  Bath bath = Bath::cold;
  Index level = 0;        // 0-based
  double weight = 0.0;    // multiplies <level| L_bath rho |level>
  double population_rate = 0.0;  // <level| L_bath rho |level>
  double value() const { return weight * population_rate; }
};

struct CurrentDecomposition {
  std::vector<CurrentTerm> terms;
  HeatCurrents summed;  // sum of terms per bath
  HeatCurrents trace;   // tr{H L_alpha rho}
  SteadySolution solution;
};

// Per-level decomposition of the three currents. Throws
// SolverError{not_converged} if any bath's summed terms deviate from the
// trace formula by more than `relative_tolerance`.
CurrentDecomposition heat_currents_decomposed(const PumpConfig& cfg, const Tolerances& tol = {},
                                              double relative_tolerance = 1e-10);

// Classical rate-equation solution of the ideal pump. The N-level generator
// maps diagonal states to diagonal states, so populations obey a Pauli master
// equation with one rate pair per transition; currents are
// sum over transitions of omega_alpha * (up * p_lower - down * p_upper).
struct RateSolution {
  Eigen::VectorXd populations;
  HeatCurrents q;
  // Net upward flux per transition, in the order of transitions(N, bath).
  std::map<Bath, std::vector<double>> fluxes;
};

RateSolution pauli_rate_oracle(const PumpConfig& cfg);

}  // namespace qhp
