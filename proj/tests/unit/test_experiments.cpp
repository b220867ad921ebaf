#include <atomic>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "qhp/errors.hpp"

using namespace qhp;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double cold_power(PumpConfig cfg, double omega_c) {
  cfg.omega_c = omega_c;
  return solve(cfg).q.cold;
}

}  // namespace

TEST(MaximizeOnInterval, Parabola) {
  int calls = 0;
  const auto f = [&](double x) {
    ++calls;
    return -(x - 0.3141) * (x - 0.3141);
  };
  const ScalarMaximum m = maximize_on_interval(f, 0.0, 1.0);
  EXPECT_NEAR(m.x, 0.3141, 1e-6);
  EXPECT_GE(m.value, m.grid_value);
  EXPECT_EQ(m.evaluations, calls);
}

TEST(MaximizeOnInterval, KeepsGridWinnerOnSpikes) {
  // Two bumps; the grid sees the taller one.
  const auto f = [](double x) { return std::exp(-std::pow((x - 0.2) / 0.05, 2)) + 2 * std::exp(-std::pow((x - 0.7) / 0.05, 2)); };
  const ScalarMaximum m = maximize_on_interval(f, 0.0, 1.0);
  EXPECT_NEAR(m.x, 0.7, 1e-5);
  EXPECT_NEAR(m.value, 2.0, 1e-9);
}

TEST(MaximizeOnInterval, BadArguments) {
  EXPECT_THROW(maximize_on_interval([](double) { return 0.0; }, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(maximize_on_interval([](double) { return 0.0; }, 0.0, 1.0, {0, 1e-6}), std::invalid_argument);
}

TEST(MaximizeCoolingPower, ReferenceEveryNInsideTheBand) {
  for (int n = 3; n <= 10; ++n) {
    const PumpConfig cfg = oracle::reference_pump(n);
    const Optimum o = maximize_cooling_power(cfg);
    EXPECT_GT(o.omega_c_star, 0.0);
    EXPECT_LT(o.omega_c_star, o.window_max);
    EXPECT_GT(o.q_c_max, 0.0);
    EXPECT_GT(o.eps_ratio, 0.0);
    EXPECT_LT(o.eps_ratio, 0.75);
    EXPECT_NEAR(rel(o.eps_star, o.omega_c_star / (cfg.omega_h - o.omega_c_star)), 0.0, 1e-12);
    EXPECT_NEAR(rel(o.carnot, carnot_cop(cfg.temperatures())), 0.0, 1e-14);
  }
}

TEST(MaximizeCoolingPower, AgreesWithBruteForceGrid) {
  for (int n : {3, 4, 7}) {
    const PumpConfig cfg = oracle::reference_pump(n);
    const Optimum o = maximize_cooling_power(cfg);
    const oracle::GridMax g = oracle::brute_grid([&](double w) { return cold_power(cfg, w); }, 0.0, o.window_max);
    EXPECT_NEAR(rel(o.q_c_max, g.value), 0.0, 1e-4) << n;
    EXPECT_GE(o.q_c_max, g.value * (1 - 1e-12)) << n;
  }
}

TEST(MaximizeCoolingPower, AgreesWithBruteForceGridOnRandomPumps) {
  for (std::uint64_t i = 0; i < 4; ++i) {
    const PumpConfig cfg = oracle::random_pump(31, i);
    const Optimum o = maximize_cooling_power(cfg);
    const oracle::GridMax g =
        oracle::brute_grid([&](double w) { return cold_power(cfg, w); }, 0.0, o.window_max, 1024);
    EXPECT_GE(o.q_c_max, g.value * (1 - 1e-12)) << i;
    EXPECT_NEAR(rel(o.q_c_max, g.value), 0.0, 1e-4) << i;
  }
}

TEST(MaximizeCoolingPower, EmptyWindow) {
  PumpConfig cfg = oracle::reference_pump(4);
  cfg.work.temperature = cfg.hot.temperature;
  try {
    maximize_cooling_power(cfg);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), SolverErrc::empty_window);
  }
}

TEST(MaximizeCoolingPower, SqueezedUsesEffectiveCarnot) {
  PumpConfig cfg = apply_variant(oracle::reference_pump(4), {StageVariant::squeezed, squeeze_db_to_r(7.0)});
  const Optimum o = maximize_cooling_power(cfg);
  cfg.omega_c = o.omega_c_star;
  EXPECT_NEAR(rel(o.carnot, carnot_cop(effective_temperatures(cfg))), 0.0, 1e-12);
  EXPECT_GT(o.carnot, carnot_cop(cfg.temperatures()));
  EXPECT_LT(o.eps_ratio, 0.75);
}

TEST(SweepStages, OrderAndThreadIndependence) {
  const std::vector<VariantSpec> variants{{StageVariant::plain}, {StageVariant::saturated}};
  const auto one = sweep_stages(oracle::reference_pump(3), 3, 6, variants, 1);
  const auto many = sweep_stages(oracle::reference_pump(3), 3, 6, variants, 4);
  ASSERT_EQ(one.size(), 8u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].n_levels, 3 + int(k / 2));
    EXPECT_EQ(one[k].variant.kind, variants[k % 2].kind);
    EXPECT_EQ(one[k].optimum.q_c_max, many[k].optimum.q_c_max);
    EXPECT_EQ(one[k].optimum.omega_c_star, many[k].optimum.omega_c_star);
  }
  EXPECT_THROW(sweep_stages(oracle::reference_pump(3), 2, 5, variants), ConfigError);
}

TEST(SampleStream, DeterministicAndIndependent) {
  SampleStream a(5, 17), b(5, 17), c(5, 18), d(6, 17);
  bool differs_c = false, differs_d = false;
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs_c |= x != c.uniform();
    differs_d |= x != d.uniform();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
  std::set<int> seen;
  for (int k = 0; k < 500; ++k) seen.insert(a.uniform_int(3, 10));
  EXPECT_EQ(seen, (std::set<int>{3, 4, 5, 6, 7, 8, 9, 10}));
  for (int k = 0; k < 500; ++k) {
    const double x = a.log_uniform({2.0, 100.0});
    EXPECT_GE(x, 2.0);
    EXPECT_LE(x, 100.0);
  }
}

TEST(SampleRangesValidation, Rejects) {
  SampleRanges r;
  EXPECT_NO_THROW(validate(r));
  r.n_max = 11;
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.t_cold = {0.0, 1.0};
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.hot_over_cold = {0.5, 2.0};
  EXPECT_THROW(validate(r), ConfigError);
  r = {};
  r.gamma_factor = {1e-2, 1e-5};
  EXPECT_THROW(validate(r), ConfigError);
}

TEST(DrawFridge, SatisfiesInvariants) {
  SampleRanges r;
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleStream s(r.seed, i);
    PumpConfig cfg;
    std::uint64_t rejected = 0;
    ASSERT_TRUE(draw_fridge(r, s, cfg, rejected));
    EXPECT_TRUE(validate(cfg).empty());
    EXPECT_GE(cfg.n_levels, 3);
    EXPECT_LE(cfg.n_levels, 10);
    EXPECT_GE(cfg.cold.temperature, 1.0);
    EXPECT_LE(cfg.cold.temperature, 1e2);
    const double ratio = cfg.hot.temperature / cfg.cold.temperature;
    EXPECT_GE(ratio, 2.0 * (1 - 1e-12));
    EXPECT_LE(ratio, 1e2 * (1 + 1e-12));
  }
}

TEST(CopHistogram, BoundAndDeterminism) {
  SampleRanges r;
  r.seed = 4242;
  const Histogram a = cop_histogram(r, 40, 1);
  const Histogram b = cop_histogram(r, 40, 3);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  std::uint64_t binned = 0;
  for (auto n : a.bins) binned += n;
  EXPECT_EQ(binned, a.samples.size());
  EXPECT_EQ(a.samples.size() + a.failed, 40u);
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    EXPECT_EQ(a.samples[k].index, b.samples[k].index);
    EXPECT_EQ(a.samples[k].optimum.eps_ratio, b.samples[k].optimum.eps_ratio);
    EXPECT_LT(a.samples[k].optimum.eps_ratio, 0.75);
  }
  EXPECT_EQ(a.max_ratio, b.max_ratio);
  EXPECT_EQ(a.rejected, b.rejected);
  const Histogram empty = cop_histogram(r, 0, 2);
  EXPECT_TRUE(empty.samples.empty());
}

TEST(CharacteristicCurve, IdealCurveIsOpenAndReachesCarnot) {
  const ComparisonParams p;
  const auto curve = characteristic_curve(CurveSystem::ideal, p, 40, 2);
  ASSERT_EQ(curve.size(), 40u);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    EXPECT_NEAR(curve[k].omega_c, p.window_max() * (k + 1) / 41.0, 1e-12);
    EXPECT_LE(curve[k].eps_over_carnot, 1 + 1e-9);
    if (k) EXPECT_GT(curve[k].eps_over_carnot, curve[k - 1].eps_over_carnot);
  }
  EXPECT_NEAR(curve.back().eps_over_carnot, 40.0 / 41.0, 1e-9);
  double peak = 0;
  for (const auto& pt : curve) peak = std::max(peak, pt.q_c);
  EXPECT_LT(curve.back().q_c, peak);
  const SteadySolution edge = solve(p.ideal(p.window_max() * (1 - 1e-6)));
  EXPECT_LT(edge.q.cold, 1e-5 * peak);
  EXPECT_NEAR(edge.cop / carnot_cop(p.temperatures()), 1.0, 1e-5);
  EXPECT_FALSE(curve_is_closed(curve));
}

TEST(CharacteristicCurve, ClosednessRule) {
  std::vector<PerformancePoint> loop{{1, 1.0, 0, 0.2}, {2, 2.0, 0, 0.6}, {3, 0.1, 0, 0.4}};
  EXPECT_TRUE(curve_is_closed(loop));
  std::vector<PerformancePoint> open{{1, 1.0, 0, 0.2}, {2, 2.0, 0, 0.6}, {3, 0.1, 0, 0.9}};
  EXPECT_FALSE(curve_is_closed(open));
  EXPECT_FALSE(curve_is_closed({}));
}

TEST(CharacteristicCurve, DressedThreeQubitCurveCloses) {
  ComparisonParams p;
  p.basis = DissipatorBasis::dressed;
  const auto curve = characteristic_curve(CurveSystem::three_qubit, p, 50, 2);
  EXPECT_TRUE(curve_is_closed(curve));
  for (const auto& pt : curve) EXPECT_LT(pt.eps_over_carnot, 1.0);
}

TEST(Compare, IdealOutperformsLocalThreeQubitByThreeOrders) {
  const Comparison c = compare_ideal_three_qubit(ComparisonParams{}, 30, 2);
  EXPECT_GE(c.power_ratio, 1e3);
  EXPECT_NEAR(c.power_ratio, c.ideal.q_c_max / c.three_qubit.q_c_max, 1e-9 * c.power_ratio);
  EXPECT_LT(c.ideal.eps_ratio, 0.75);
  EXPECT_LT(c.three_qubit.eps_ratio, 0.75);
}

TEST(ParallelFor, VisitsAllAndRethrowsLowestIndex) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}
