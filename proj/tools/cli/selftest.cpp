#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "cli/run.hpp"
#include "qhp/steady_state.hpp"

namespace qhp::cli {

namespace {

class Report {
 public:
  explicit Report(std::ostream& os) : os_(os) {}

  void check(const std::string& name, bool ok, const std::string& detail) {
    os_ << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    ok_ = ok_ && ok;
  }
  bool ok() const { return ok_; }

 private:
  std::ostream& os_;
  bool ok_ = true;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

bool run_selftest(std::ostream& os, std::uint64_t seed, int threads) {
  Report report(os);

  const Temperatures temps{7.1e3, 1.57e3, 54.25};
  const double window = cooling_window_max(102.6, temps);
  const double carnot = carnot_cop(temps);
  report.check("window_formula", rel(window, 2.782565222609013) < 1e-12 && rel(carnot, 0.027876545102712598) < 1e-12,
               "omega_c_max=" + sci(window) + " eps_C=" + sci(carnot));

  constexpr int kConfigs = 24;
  SampleRanges ranges;
  ranges.seed = seed;
  double worst_first = 0, worst_entropy = 0, worst_ideal = 0, worst_oracle = 0, worst_coherence = 0;
  int failures = 0;
  std::vector<std::string> errors(kConfigs);
  std::vector<std::array<double, 5>> stats(kConfigs);
  parallel_for(kConfigs, threads, [&](std::size_t i) {
    SampleStream stream(seed, i);
    PumpConfig cfg;
    std::uint64_t rejected = 0;
    if (!draw_fridge(ranges, stream, cfg, rejected)) {
      errors[i] = "no admissible draw";
      return;
    }
    cfg.omega_c = effective_window_max(cfg) * (0.05 + 0.9 * stream.uniform());
    const SteadySolution s = solve(cfg);
    const RateSolution r = pauli_rate_oracle(cfg);
    heat_currents_decomposed(cfg);
    double oracle = 0;
    for (Bath b : kAllBaths) oracle = std::max(oracle, std::abs(s.q[b] - r.q[b]) / s.q.max_abs());
    CMatrix off = s.rho;
    off.diagonal().setZero();
    stats[i] = {s.residuals.at("first_law"), -s.entropy_rate, s.residuals.at("ideality_cold_work"), oracle,
                off.cwiseAbs().sum()};
  });
  for (int i = 0; i < kConfigs; ++i) {
    if (!errors[i].empty()) {
      ++failures;
      continue;
    }
    worst_first = std::max(worst_first, stats[i][0]);
    worst_entropy = std::max(worst_entropy, stats[i][1]);
    worst_ideal = std::max(worst_ideal, stats[i][2]);
    worst_oracle = std::max(worst_oracle, stats[i][3]);
    worst_coherence = std::max(worst_coherence, stats[i][4]);
  }
  report.check("random_configs_drawn", failures == 0, std::to_string(kConfigs - failures) + "/" +
                                                          std::to_string(kConfigs));
  report.check("first_law", worst_first <= 1e-10, "max relative residual " + sci(worst_first));
  report.check("second_law", worst_entropy <= 1e-12, "most negative entropy rate " + sci(-worst_entropy));
  report.check("ideality", worst_ideal <= 1e-8, "max relative deviation " + sci(worst_ideal));
  report.check("rate_oracle", worst_oracle <= 1e-6, "max relative current mismatch " + sci(worst_oracle));
  report.check("diagonal_state", worst_coherence <= 1e-10, "max off-diagonal mass " + sci(worst_coherence));

  PumpConfig cfg;
  cfg.omega_h = 102.6;
  cfg.work = {Bath::work, temps.work, 3.5e-3};
  cfg.hot = {Bath::hot, temps.hot, 5.1e-3};
  cfg.cold = {Bath::cold, temps.cold, 8.8e-3};
  cfg.n_levels = 4;
  cfg.omega_c = 0.99 * window;
  const double below = solve(cfg).q.cold;
  cfg.omega_c = 1.01 * window;
  const double above = solve(cfg).q.cold;
  report.check("window_sign_flip", below > 0 && above < 0, "q_c " + sci(below) + " -> " + sci(above));
  return report.ok();
}

}  // namespace qhp::cli
