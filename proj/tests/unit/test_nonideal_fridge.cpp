#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "qhp/errors.hpp"

using namespace qhp;

namespace {

ThreeQubitConfig comparison_fridge(double omega_c, DissipatorBasis basis = DissipatorBasis::local) {
  ComparisonParams p;
  p.basis = basis;
  return p.three_qubit(omega_c);
}

double window() { return ComparisonParams{}.window_max(); }

}  // namespace

TEST(ThreeQubitHamiltonian, UncoupledSpectrum) {
  ThreeQubitConfig cfg = comparison_fridge(1.5);
  cfg.g = 0.0;
  const CMatrix h = build_three_qubit_hamiltonian(cfg);
  EXPECT_TRUE(h.isDiagonal());
  std::vector<double> e;
  for (Index k = 0; k < 8; ++k) e.push_back(h(k, k).real());
  std::sort(e.begin(), e.end());
  const double c = cfg.omega_c, w = cfg.omega_w, hh = cfg.omega_h();
  std::vector<double> expected{0, c, w, hh, c + w, c + hh, w + hh, c + w + hh};
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(e[k], expected[k], 1e-12);
}

TEST(ThreeQubitHamiltonian, ResonantPairSplitsByTwoG) {
  const ThreeQubitConfig cfg = comparison_fridge(1.5);
  const CMatrix h = build_three_qubit_hamiltonian(cfg);
  // |110> is index 6, |001> is index 1.
  EXPECT_EQ(h(6, 1), Complex(0.1));
  EXPECT_EQ(h(1, 6), Complex(0.1));
  EXPECT_DOUBLE_EQ(h(6, 6).real(), h(1, 1).real());
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  std::vector<double> e(es.eigenvalues().data(), es.eigenvalues().data() + 8);
  const double hh = cfg.omega_h();
  const auto near = [&](double x) {
    return std::any_of(e.begin(), e.end(), [&](double y) { return std::abs(x - y) < 1e-12; });
  };
  EXPECT_TRUE(near(hh + 0.1));
  EXPECT_TRUE(near(hh - 0.1));
}

TEST(EmbedQubit, OrderIsColdWorkHot) {
  CMatrix sm = CMatrix::Zero(2, 2);
  sm(0, 1) = 1.0;
  const CMatrix id = CMatrix::Identity(2, 2);
  EXPECT_EQ(embed_qubit_operator(sm, qubit_of(Bath::cold)),
            oracle::kron_by_definition(oracle::kron_by_definition(sm, id), id));
  EXPECT_EQ(embed_qubit_operator(sm, qubit_of(Bath::work)),
            oracle::kron_by_definition(oracle::kron_by_definition(id, sm), id));
  EXPECT_EQ(embed_qubit_operator(sm, qubit_of(Bath::hot)),
            oracle::kron_by_definition(oracle::kron_by_definition(id, id), sm));
}

TEST(ThreeQubitSolve, UncoupledIsAProductOfGibbsQubits) {
  ThreeQubitConfig cfg = comparison_fridge(1.5);
  cfg.g = 0.0;
  const SteadySolution s = solve_three_qubit(cfg);
  const double pc = 1 / (1 + std::exp(cfg.omega_c / cfg.cold.temperature));
  const double pw = 1 / (1 + std::exp(cfg.omega_w / cfg.work.temperature));
  const double ph = 1 / (1 + std::exp(cfg.omega_h() / cfg.hot.temperature));
  for (int c = 0; c < 2; ++c)
    for (int w = 0; w < 2; ++w)
      for (int h = 0; h < 2; ++h) {
        const double p = (c ? pc : 1 - pc) * (w ? pw : 1 - pw) * (h ? ph : 1 - ph);
        EXPECT_NEAR(s.rho(4 * c + 2 * w + h, 4 * c + 2 * w + h).real(), p, 1e-12);
      }
  const double scale = cfg.hot.gamma * std::pow(cfg.omega_h(), 4);
  EXPECT_LE(s.q.max_abs(), 1e-12 * scale);
}

TEST(ThreeQubitSolve, EqualTemperaturesCarryNoHeat) {
  for (DissipatorBasis basis : {DissipatorBasis::local, DissipatorBasis::dressed}) {
    ThreeQubitConfig cfg = comparison_fridge(1.5, basis);
    cfg.work.temperature = cfg.hot.temperature = cfg.cold.temperature = 20.0;
    const SteadySolution s = solve_three_qubit(cfg);
    const double scale = cfg.hot.gamma * std::pow(cfg.omega_h(), 4);
    EXPECT_LE(s.q.max_abs(), 1e-12 * scale) << to_string(basis);
  }
}

TEST(ThreeQubitSolve, LawsHoldAcrossTheWindow) {
  for (DissipatorBasis basis : {DissipatorBasis::local, DissipatorBasis::dressed}) {
    const double carnot = carnot_cop(comparison_fridge(1.0).temperatures());
    for (double f : {0.05, 0.3, 0.6, 0.9}) {
      const SteadySolution s = solve_three_qubit(comparison_fridge(f * window(), basis));
      EXPECT_LE(std::abs(s.q.sum()), 1e-10 * s.q.max_abs());
      EXPECT_GE(s.entropy_rate, -1e-12);
      if (s.q.cold > 0) EXPECT_LT(s.cop, carnot);
    }
  }
}

TEST(ThreeQubitSolve, CoherenceOnTheResonantPair) {
  const SteadySolution s = solve_three_qubit(comparison_fridge(0.5 * window()));
  EXPECT_GT(std::abs(s.rho(6, 1)), 0.0);
}

TEST(ThreeQubitSolve, LocalDampingKeepsQuantaLocked) {
  // Each bath only exchanges quanta with its own qubit, so one cold and one
  // work quantum always leave together with one hot quantum.
  const ThreeQubitConfig cfg = comparison_fridge(0.5 * window());
  const SteadySolution s = solve_three_qubit(cfg);
  EXPECT_LE(s.residuals.at("ideality_cold_work"), 1e-8);
}

TEST(ThreeQubitSolve, DressedDampingBreaksIdeality) {
  const ThreeQubitConfig cfg = comparison_fridge(0.5 * window(), DissipatorBasis::dressed);
  const SteadySolution s = solve_three_qubit(cfg);
  EXPECT_GT(s.residuals.at("ideality_cold_work"), 1e-4);
}

TEST(ThreeQubitValidate, Rules) {
  ThreeQubitConfig cfg = comparison_fridge(1.0);
  EXPECT_TRUE(validate(cfg).empty());
  cfg.g = 0.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate_structure(cfg));
  cfg = comparison_fridge(1.0);
  cfg.g = 5.0;
  EXPECT_FALSE(validate(cfg).empty());
  cfg = comparison_fridge(1.0);
  cfg.work.squeeze_r = 0.3;
  EXPECT_THROW(validate_structure(cfg), ConfigError);
  cfg = comparison_fridge(1.0);
  cfg.hot.temperature = 500;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = comparison_fridge(-1.0);
  EXPECT_THROW(validate_structure(cfg), ConfigError);
}
