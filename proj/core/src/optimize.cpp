#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <vector>

#include "qhp/errors.hpp"
#include "qhp/experiments.hpp"
#include "qhp/steady_state.hpp"

namespace qhp {

ScalarMaximum maximize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                                   const MaximizeOptions& options) {
  if (!(hi > lo)) throw std::invalid_argument("maximize_on_interval: empty interval");
  if (options.grid_points < 1) throw std::invalid_argument("maximize_on_interval: grid_points must be >= 1");

  ScalarMaximum out;
  const int m = options.grid_points;
  const double step = (hi - lo) / (m + 1);
  int best = 1;
  for (int k = 1; k <= m; ++k) {
    const double x = lo + step * k;
    const double v = f(x);
    ++out.evaluations;
    if (k == 1 || v > out.grid_value) {
      out.grid_value = v;
      out.grid_x = x;
      best = k;
    }
  }
  out.x = out.grid_x;
  out.value = out.grid_value;

  // golden section on [x_{best-1}, x_{best+1}]
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + step * (best - 1);
  double b = lo + step * (best + 1);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  out.evaluations += 2;
  const double stop = options.relative_width * (hi - lo);
  while (b - a > stop) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  const double x = fc > fd ? c : d;
  const double v = std::max(fc, fd);
  if (v > out.value) {
    out.x = x;
    out.value = v;
  }
  return out;
}

Optimum maximize_cooling_power(const PumpConfig& tmpl, const MaximizeOptions& options) {
  PumpConfig cfg = tmpl;
  cfg.omega_c = cfg.omega_h / 2;
  validate_structure(cfg);
  const double window = effective_window_max(cfg);
  if (!(window > 0.0)) throw SolverError(SolverErrc::empty_window, "cooling window is empty");
  cfg.omega_c = window / 2;
  validate(cfg);

  double best_x = 0.0;
  SteadySolution best;
  bool have_best = false;
  const auto q_cold = [&](double omega_c) {
    cfg.omega_c = omega_c;
    SteadySolution s = solve(cfg);
    if (!have_best || s.q.cold > best.q.cold) {
      best = s;
      best_x = omega_c;
      have_best = true;
    }
    return s.q.cold;
  };
  const ScalarMaximum m = maximize_on_interval(q_cold, 0.0, window, options);

  Optimum out;
  out.omega_c_star = best_x;
  out.q_c_max = best.q.cold;
  out.eps_star = best.cop;
  out.window_max = window;
  cfg.omega_c = best_x;
  out.carnot = carnot_cop(effective_temperatures(cfg));
  out.eps_ratio = out.eps_star / out.carnot;
  out.evaluations = m.evaluations;
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);

  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qhp
