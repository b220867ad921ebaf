#include <cmath>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "qhp/errors.hpp"

using namespace qhp;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::vector<oracle::Channel> channels(const PumpConfig& cfg) {
  std::vector<oracle::Channel> out;
  for (Bath b : kAllBaths) {
    const double w = cfg.frequency(b);
    const double occ = oracle::occupation(w, cfg.bath(b).temperature);
    const double g = cfg.bath(b).gamma * w * w * w;
    out.push_back({build_jump_operator(cfg, b), g * (1 + occ), g * occ});
  }
  return out;
}

PumpConfig equal_temperatures(int n, double t) {
  PumpConfig cfg = oracle::reference_pump(n);
  cfg.work.temperature = cfg.hot.temperature = cfg.cold.temperature = t;
  return cfg;
}

}  // namespace

TEST(Dissipator, ZeroRatesGiveZeroGenerator) {
  const PumpConfig cfg = oracle::reference_pump(4);
  EXPECT_EQ(build_dissipator(build_jump_operator(cfg, Bath::hot), {0.0, 0.0}).matrix.nonZeros(), 0);
}

TEST(Dissipator, TwoLevelFixedPoint) {
  CMatrix j = CMatrix::Zero(2, 2);
  j(0, 1) = 1.0;
  const RatePair r{0.9, 0.4};
  const CMatrix rho = devectorize(stationary_vector(build_dissipator(j, r)).vector, 2);
  EXPECT_NEAR(rho(1, 1).real(), r.up / (r.up + r.down), 1e-15);
}

TEST(Dissipator, ThreeLevelColdFlowByHand) {
  const PumpConfig cfg = oracle::reference_pump(3);
  const RatePair r = decay_rates(cfg.cold, cfg.omega_c);
  CMatrix rho = CMatrix::Zero(3, 3);
  rho(0, 0) = 1.0;
  const ExtMatrix out = qhp::apply(build_dissipator(build_jump_operator(cfg, Bath::cold), r), rho);
  // Absorption empties |1> into |2> at the up rate; nothing else moves.
  EXPECT_NEAR(static_cast<double>(out(0, 0).real()), -r.up, 1e-15 * r.up);
  EXPECT_NEAR(static_cast<double>(out(1, 1).real()), r.up, 1e-15 * r.up);
  EXPECT_EQ(out(2, 2), ExtComplex(0));
  EXPECT_LE(static_cast<double>((out - ExtMatrix(out.diagonal().asDiagonal())).cwiseAbs().maxCoeff()), 0.0);
}

TEST(Liouvillian, MatchesHandExpandedGenerator) {
  for (int n = 3; n <= 8; ++n) {
    const PumpConfig cfg = oracle::random_pump(11, n, n);
    const Eigen::MatrixXcd lib = build_liouvillian(cfg).dense().cast<Complex>();
    const Eigen::MatrixXcd ref = oracle::naive_generator(build_hamiltonian(cfg), channels(cfg));
    EXPECT_LE((lib - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff()) << "N=" << n;
  }
}

TEST(Liouvillian, TracePreserving) {
  for (int n = 3; n <= 10; ++n) {
    const SuperOp l = build_liouvillian(oracle::reference_pump(n));
    EXPECT_LE(trace_defect(l), 1e-10 * inf_norm(l));
  }
}

TEST(Liouvillian, NoDissipationLeavesDiagonalStatesAlone) {
  PumpConfig cfg = oracle::reference_pump(5);
  cfg.work.gamma = cfg.hot.gamma = cfg.cold.gamma = 0.0;
  const SuperOp l = build_liouvillian(cfg);
  CMatrix rho = CMatrix::Zero(5, 5);
  rho.diagonal() << 0.1, 0.3, 0.2, 0.25, 0.15;
  EXPECT_EQ(static_cast<double>(qhp::apply(l, rho).cwiseAbs().maxCoeff()), 0.0);
  const GeneratorParts parts = build_generator_parts(cfg);
  EXPECT_LE((parts.total().dense() - parts.unitary.dense()).cwiseAbs().maxCoeff(), 0.0L);
}

TEST(Solve, EqualTemperaturesGiveGibbsState) {
  for (int n : {3, 4, 7}) {
    const double t = 40.0;
    const PumpConfig cfg = equal_temperatures(n, t);
    const SteadySolution s = solve(cfg);
    const auto e = oracle::ideal_energies(n, cfg.omega_h, cfg.omega_c);
    double z = 0;
    for (double x : e) z += std::exp(-x / t);
    for (int k = 0; k < n; ++k) EXPECT_NEAR(s.rho(k, k).real(), std::exp(-e[k] / t) / z, 1e-9);
    const double scale = decay_rates(cfg.hot, cfg.omega_h).down * cfg.omega_h;
    EXPECT_LE(s.q.max_abs(), 1e-12 * scale);
    EXPECT_EQ(s.mode, OperatingMode::equilibrium);
  }
}

TEST(Solve, ReferenceKernelResidual) {
  const SteadySolution s = solve(oracle::reference_pump(3));
  EXPECT_LE(s.residuals.at("kernel_residual"), 1e-10);
  EXPECT_EQ(s.mode, OperatingMode::chiller);
}

TEST(Solve, ThreeLevelIdealityAgainstRateEquation) {
  const PumpConfig cfg = oracle::reference_pump(3);
  const SteadySolution s = solve(cfg);
  EXPECT_NEAR(rel(s.q.cold / s.q.work, cfg.omega_c / cfg.omega_w()), 0.0, 1e-8);
  EXPECT_NEAR(rel(s.q.cold / std::abs(s.q.hot), cfg.omega_c / cfg.omega_h), 0.0, 1e-8);
  const oracle::RateEquation r = oracle::rate_equation(cfg);
  EXPECT_NEAR(rel(s.q.cold, r.q_cold), 0.0, 1e-9);
  EXPECT_NEAR(rel(s.q.work, r.q_work), 0.0, 1e-9);
  EXPECT_NEAR(rel(s.q.hot, r.q_hot), 0.0, 1e-9);
}

TEST(Solve, CurrentsVanishAtTheWindowEdge) {
  for (int n : {3, 4, 5, 8}) {
    PumpConfig cfg = oracle::reference_pump(n);
    const HeatCurrents mid = solve(cfg).q;
    const double edge = cooling_window_max(cfg.omega_h, cfg.temperatures());
    cfg.omega_c = edge * (1 - 1e-8);
    const HeatCurrents near = solve(cfg).q;
    for (Bath b : kAllBaths) EXPECT_LE(std::abs(near[b]), 1e-6 * std::abs(mid[b])) << to_string(b);
    cfg.omega_c = edge;
    EXPECT_EQ(solve(cfg).mode, OperatingMode::boundary);
  }
}

TEST(Solve, WindowSignStructure) {
  for (int n = 3; n <= 10; ++n) {
    PumpConfig cfg = oracle::reference_pump(n);
    const double edge = cooling_window_max(cfg.omega_h, cfg.temperatures());
    for (double f : {0.01, 0.3, 0.7, 0.99}) {
      cfg.omega_c = f * edge;
      const SteadySolution s = solve(cfg);
      EXPECT_GT(s.q.cold, 0.0);
      EXPECT_EQ(s.mode, OperatingMode::chiller);
    }
    for (double f : {1.01, 2.0, 10.0, 30.0}) {
      cfg.omega_c = f * edge;
      if (cfg.omega_c >= cfg.omega_h) continue;
      const SteadySolution s = solve(cfg);
      EXPECT_LT(s.q.cold, 0.0);
      EXPECT_EQ(s.mode, OperatingMode::heat_transformer);
    }
  }
}

TEST(Solve, RandomConfigInvariants) {
  for (std::uint64_t i = 0; i < 120; ++i) {
    const PumpConfig cfg = oracle::random_pump(2024, i);
    const SteadySolution s = solve(cfg);
    EXPECT_LE(std::abs(s.q.sum()), 1e-10 * s.q.max_abs()) << i;
    EXPECT_GE(s.entropy_rate, -1e-12) << i;
    EXPECT_NEAR(rel(std::abs(s.q.cold / s.q.work), cfg.omega_c / cfg.omega_w()), 0.0, 1e-8) << i;
    EXPECT_NEAR(rel(s.cop, cfg.omega_c / (cfg.omega_h - cfg.omega_c)), 0.0, 1e-8) << i;
    EXPECT_LE(s.cop, carnot_cop(cfg.temperatures()) * (1 + 1e-12)) << i;
    CMatrix off = s.rho;
    off.diagonal().setZero();
    EXPECT_LE(off.cwiseAbs().sum(), 1e-10) << i;
  }
}

TEST(Solve, StiffConfigKeepsFirstLaw) {
  // Gross fluxes on the fast transitions exceed the net flux by ~1e10.
  PumpConfig cfg;
  cfg.n_levels = 4;
  cfg.omega_h = 0.3032;
  cfg.omega_c = 7.354e-4;
  cfg.work = {Bath::work, 4659.0, 1e-7};
  cfg.hot = {Bath::hot, 134.6, 3e-8};
  cfg.cold = {Bath::cold, 1.506, 2e-9};
  const SteadySolution s = solve(cfg);
  EXPECT_LE(s.residuals.at("first_law"), 1e-10);
  EXPECT_LE(s.residuals.at("ideality_cold_work"), 1e-8);
}

TEST(Solve, EvenToOddIsDetrimentalAndPlusTwoHelps) {
  for (double f : {0.1, 0.5, 0.9}) {
    HeatCurrents q[11];
    for (int n = 3; n <= 10; ++n) {
      PumpConfig cfg = oracle::reference_pump(n);
      cfg.omega_c = f * cooling_window_max(cfg.omega_h, cfg.temperatures());
      q[n] = solve(cfg).q;
    }
    for (Bath b : kAllBaths) {
      for (int n = 4; n + 1 <= 10; n += 2) EXPECT_LE(std::abs(q[n + 1][b]), std::abs(q[n][b])) << n << " f=" << f;
      for (int n = 3; n + 2 <= 10; ++n) EXPECT_GE(std::abs(q[n + 2][b]), std::abs(q[n][b]) * (1 - 1e-12)) << n;
    }
  }
}

TEST(Decomposition, ThreeLevelSingleTerms) {
  const CurrentDecomposition d = heat_currents_decomposed(oracle::reference_pump(3));
  ASSERT_EQ(d.terms.size(), 3u);
  for (Bath b : kAllBaths) EXPECT_NEAR(rel(d.summed[b], d.trace[b]), 0.0, 1e-10);
  for (const CurrentTerm& t : d.terms) {
    if (t.bath == Bath::work) EXPECT_EQ(t.level, 2);  // <3| L_w rho |3>
    if (t.bath == Bath::hot) EXPECT_EQ(t.level, 2);
    if (t.bath == Bath::cold) EXPECT_EQ(t.level, 1);  // <2| L_c rho |2>
  }
}

TEST(Decomposition, FourLevelColdUsesLevelsTwoAndFour) {
  const CurrentDecomposition d = heat_currents_decomposed(oracle::reference_pump(4));
  std::vector<Index> cold;
  for (const CurrentTerm& t : d.terms)
    if (t.bath == Bath::cold) cold.push_back(t.level);
  EXPECT_EQ(cold, (std::vector<Index>{1, 3}));
  EXPECT_NEAR(rel(d.summed.cold, d.trace.cold), 0.0, 1e-10);
}

TEST(Decomposition, SumsMatchTraceFormula) {
  for (int n = 5; n <= 10; ++n) {
    const CurrentDecomposition d = heat_currents_decomposed(oracle::random_pump(5, n, n));
    for (Bath b : kAllBaths) EXPECT_NEAR(rel(d.summed[b], d.trace[b]), 0.0, 1e-10) << n;
  }
}

TEST(Decomposition, ColdTermOfLevelTwoFromThreeToFourLevels) {
  const auto term = [](int n) {
    for (const CurrentTerm& t : heat_currents_decomposed(oracle::reference_pump(n)).terms)
      if (t.bath == Bath::cold && t.level == 1) return std::abs(t.population_rate);
    return 0.0;
  };
  const double three = term(3), four = term(4);
  ::testing::Test::RecordProperty("cold_level2_N3", std::to_string(three));
  ::testing::Test::RecordProperty("cold_level2_N4", std::to_string(four));
  EXPECT_GT(three, 0.0);
  EXPECT_GT(four, 0.0);
}

TEST(RateOracle, MatchesSolveOnSevenLevels) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const PumpConfig cfg = oracle::random_pump(77, i, 7);
    const SteadySolution s = solve(cfg);
    const RateSolution r = pauli_rate_oracle(cfg);
    for (int k = 0; k < 7; ++k) EXPECT_NEAR(s.rho(k, k).real(), r.populations(k), 1e-7);
    for (Bath b : kAllBaths) EXPECT_LE(std::abs(s.q[b] - r.q[b]), 1e-6 * s.q.max_abs());
  }
}

TEST(RateOracle, TightOnModerateConfigs) {
  for (int n = 3; n <= 10; ++n) {
    const PumpConfig cfg = oracle::reference_pump(n);
    const SteadySolution s = solve(cfg);
    const RateSolution r = pauli_rate_oracle(cfg);
    const oracle::RateEquation e = oracle::rate_equation(cfg);
    for (Bath b : kAllBaths) EXPECT_NEAR(rel(s.q[b], r.q[b]), 0.0, 1e-9);
    EXPECT_NEAR(rel(s.q.cold, e.q_cold), 0.0, 1e-9);
  }
}

TEST(RateOracle, ThreeLevelSignFlipAtTheEdge) {
  PumpConfig cfg = oracle::reference_pump(3);
  const double edge = cooling_window_max(cfg.omega_h, cfg.temperatures());
  cfg.omega_c = edge * (1 - 1e-9);
  EXPECT_GT(pauli_rate_oracle(cfg).q.cold, 0.0);
  cfg.omega_c = edge * (1 + 1e-9);
  EXPECT_LT(pauli_rate_oracle(cfg).q.cold, 0.0);
}

TEST(RateOracle, ThreeLevelIsOneCycle) {
  // Every transition carries the same net flux, cold and work up, hot down.
  const RateSolution r = pauli_rate_oracle(oracle::reference_pump(3));
  const double f = r.fluxes.at(Bath::cold)[0];
  EXPECT_GT(f, 0.0);
  EXPECT_NEAR(rel(r.fluxes.at(Bath::work)[0], f), 0.0, 1e-12);
  EXPECT_NEAR(rel(-r.fluxes.at(Bath::hot)[0], f), 0.0, 1e-12);
}

TEST(RateOracle, EqualTemperaturesGiveNoFlux) {
  const RateSolution r = pauli_rate_oracle(equal_temperatures(6, 30.0));
  for (Bath b : kAllBaths)
    for (double f : r.fluxes.at(b)) EXPECT_LE(std::abs(f), 1e-15);
}

TEST(Generator, ThrowsOnInvalidStructure) {
  PumpConfig cfg = oracle::reference_pump(3);
  cfg.omega_c = -1;
  EXPECT_THROW(solve(cfg), ConfigError);
}
