#include "qhp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qhp/errors.hpp"
#include "qhp/steady_state.hpp"

namespace qhp {

std::string_view to_string(StageVariant v) noexcept {
  switch (v) {
    case StageVariant::plain: return "plain";
    case StageVariant::squeezed: return "squeezed";
    case StageVariant::saturated: return "saturated";
  }
  return "?";
}

std::string_view to_string(CurveSystem s) noexcept {
  switch (s) {
    case CurveSystem::ideal: return "ideal";
    case CurveSystem::three_qubit: return "three_qubit";
  }
  return "?";
}

PumpConfig apply_variant(PumpConfig cfg, const VariantSpec& variant) {
  cfg.work.squeeze_r = variant.kind == StageVariant::squeezed ? variant.squeeze_r : 0.0;
  cfg.work.saturated = variant.kind == StageVariant::saturated;
  return cfg;
}

std::vector<StageRow> sweep_stages(const PumpConfig& params, int n_min, int n_max,
                                   const std::vector<VariantSpec>& variants, int threads) {
  if (n_min < 3 || n_max < n_min) throw ConfigError("sweep_stages: need 3 <= n_min <= n_max");
  std::vector<StageRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    for (const VariantSpec& v : variants) rows.push_back({n, v, {}});
  }
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    PumpConfig cfg = apply_variant(params, rows[i].variant);
    cfg.n_levels = rows[i].n_levels;
    rows[i].optimum = maximize_cooling_power(cfg);
  });
  return rows;
}

namespace {

void check_range(const LogRange& r, const char* name) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi)) {
    throw ConfigError(std::string("sample range ") + name + " must satisfy 0 < lo <= hi < inf");
  }
}

}  // namespace

void validate(const SampleRanges& ranges) {
  check_range(ranges.t_cold, "t_cold");
  check_range(ranges.hot_over_cold, "hot_over_cold");
  check_range(ranges.work_over_hot, "work_over_hot");
  check_range(ranges.omega_h_over_cold, "omega_h_over_cold");
  check_range(ranges.gamma_factor, "gamma_factor");
  if (!(ranges.hot_over_cold.lo > 1.0) || !(ranges.work_over_hot.lo > 1.0)) {
    throw ConfigError("temperature ratios must exceed 1");
  }
  if (ranges.n_min < 3 || ranges.n_max > 10 || ranges.n_max < ranges.n_min) {
    throw ConfigError("N range must lie within [3, 10]");
  }
  if (ranges.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

SampleStream::SampleStream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double SampleStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SampleStream::log_uniform(const LogRange& r) {
  const double a = std::log(r.lo);
  const double b = std::log(r.hi);
  return std::exp(a + (b - a) * uniform());
}

int SampleStream::uniform_int(int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + std::min(span - 1, static_cast<int>(uniform() * span));
}

bool draw_fridge(const SampleRanges& ranges, SampleStream& stream, PumpConfig& out, std::uint64_t& rejected) {
  for (int attempt = 0; attempt < ranges.max_attempts; ++attempt) {
    PumpConfig cfg;
    cfg.cold.temperature = stream.log_uniform(ranges.t_cold);
    cfg.hot.temperature = cfg.cold.temperature * stream.log_uniform(ranges.hot_over_cold);
    cfg.work.temperature = cfg.hot.temperature * stream.log_uniform(ranges.work_over_hot);
    cfg.omega_h = cfg.cold.temperature * stream.log_uniform(ranges.omega_h_over_cold);
    cfg.n_levels = stream.uniform_int(ranges.n_min, ranges.n_max);
    const double window = cooling_window_max(cfg.omega_h, cfg.temperatures());
    const double scale = std::min(window, cfg.cold.temperature);
    for (Bath b : kAllBaths) cfg.bath(b).gamma = scale * stream.log_uniform(ranges.gamma_factor);
    cfg.omega_c = window / 2;
    if (validate(cfg).empty()) {
      out = cfg;
      return true;
    }
    ++rejected;
  }
  return false;
}

Histogram cop_histogram(const SampleRanges& ranges, std::uint64_t n_samples, int threads) {
  validate(ranges);
  struct Slot {
    std::optional<HistogramSample> sample;
    std::uint64_t rejected = 0;
  };
  std::vector<Slot> slots(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    SampleStream stream(ranges.seed, i);
    PumpConfig cfg;
    if (!draw_fridge(ranges, stream, cfg, slots[i].rejected)) return;
    try {
      slots[i].sample = HistogramSample{i, cfg, maximize_cooling_power(cfg)};
    } catch (const SolverError&) {
    }
  });

  Histogram h;
  const auto n_bins = static_cast<std::size_t>(std::lround(1.0 / h.bin_width));
  h.bins.assign(n_bins, 0);
  double total = 0.0;
  for (Slot& slot : slots) {
    h.rejected += slot.rejected;
    if (!slot.sample) {
      ++h.failed;
      continue;
    }
    const double r = slot.sample->optimum.eps_ratio;
    h.max_ratio = h.samples.empty() ? r : std::max(h.max_ratio, r);
    total += r;
    const auto k = static_cast<std::size_t>(std::clamp(std::floor(r / h.bin_width), 0.0, double(n_bins - 1)));
    ++h.bins[k];
    h.samples.push_back(std::move(*slot.sample));
  }
  if (!h.samples.empty()) h.mean_ratio = total / static_cast<double>(h.samples.size());
  return h;
}

PumpConfig ComparisonParams::ideal(double omega_c) const {
  PumpConfig cfg;
  cfg.n_levels = ideal_levels;
  cfg.omega_c = omega_c;
  cfg.omega_h = omega_c + omega_w;
  cfg.work = work;
  cfg.hot = hot;
  cfg.cold = cold;
  return cfg;
}

ThreeQubitConfig ComparisonParams::three_qubit(double omega_c) const {
  ThreeQubitConfig cfg;
  cfg.omega_c = omega_c;
  cfg.omega_w = omega_w;
  cfg.g = g;
  cfg.work = work;
  cfg.hot = hot;
  cfg.cold = cold;
  cfg.basis = basis;
  return cfg;
}

double ComparisonParams::window_max() const { return carnot_cop(temperatures()) * omega_w; }

namespace {

SteadySolution solve_system(CurveSystem system, const ComparisonParams& params, double omega_c) {
  if (system == CurveSystem::ideal) return solve(params.ideal(omega_c));
  return solve_three_qubit(params.three_qubit(omega_c));
}

void check_params(const ComparisonParams& params) {
  const double mid = params.window_max() / 2;
  validate(params.ideal(mid));
  validate(params.three_qubit(mid));
}

}  // namespace

std::vector<PerformancePoint> characteristic_curve(CurveSystem system, const ComparisonParams& params,
                                                   int n_points, int threads) {
  if (n_points < 1) throw ConfigError("characteristic_curve: n_points must be >= 1");
  check_params(params);
  const double window = params.window_max();
  const double carnot = carnot_cop(params.temperatures());
  std::vector<PerformancePoint> curve(static_cast<std::size_t>(n_points));
  parallel_for(curve.size(), threads, [&](std::size_t i) {
    const double omega_c = window * static_cast<double>(i + 1) / (n_points + 1);
    const SteadySolution s = solve_system(system, params, omega_c);
    curve[i] = {omega_c, s.q.cold, s.cop, s.cop / carnot};
  });
  return curve;
}

bool curve_is_closed(const std::vector<PerformancePoint>& curve) {
  if (curve.size() < 2) return false;
  double peak = curve.front().q_c;
  double top = curve.front().eps_over_carnot;
  for (const auto& p : curve) {
    peak = std::max(peak, p.q_c);
    top = std::max(top, p.eps_over_carnot);
  }
  const PerformancePoint& last = curve.back();
  return last.eps_over_carnot < 0.95 * top && last.q_c < 0.25 * peak;
}

Optimum maximize_fixed_work(CurveSystem system, const ComparisonParams& params, const MaximizeOptions& options) {
  check_params(params);
  const double window = params.window_max();
  if (!(window > 0.0)) throw SolverError(SolverErrc::empty_window, "cooling window is empty");

  double best_x = 0.0;
  std::optional<SteadySolution> best;
  const auto q_cold = [&](double omega_c) {
    SteadySolution s = solve_system(system, params, omega_c);
    if (!best || s.q.cold > best->q.cold) {
      best = s;
      best_x = omega_c;
    }
    return s.q.cold;
  };
  const ScalarMaximum m = maximize_on_interval(q_cold, 0.0, window, options);

  Optimum out;
  out.omega_c_star = best_x;
  out.q_c_max = best->q.cold;
  out.eps_star = best->cop;
  out.window_max = window;
  out.carnot = carnot_cop(params.temperatures());
  out.eps_ratio = out.eps_star / out.carnot;
  out.evaluations = m.evaluations;
  return out;
}

Comparison compare_ideal_three_qubit(const ComparisonParams& params, int n_points, int threads) {
  Comparison c;
  Optimum optima[2];
  parallel_for(2, threads, [&](std::size_t i) {
    optima[i] = maximize_fixed_work(i == 0 ? CurveSystem::ideal : CurveSystem::three_qubit, params);
  });
  c.ideal = optima[0];
  c.three_qubit = optima[1];
  c.power_ratio = c.ideal.q_c_max / c.three_qubit.q_c_max;
  c.ideal_curve = characteristic_curve(CurveSystem::ideal, params, n_points, threads);
  c.three_qubit_curve = characteristic_curve(CurveSystem::three_qubit, params, n_points, threads);
  c.three_qubit_closed = curve_is_closed(c.three_qubit_curve);
  for (const auto& p : c.three_qubit_curve) {
    c.three_qubit_max_eps_ratio = std::max(c.three_qubit_max_eps_ratio, p.eps_over_carnot);
  }
  return c;
}

}  // namespace qhp
