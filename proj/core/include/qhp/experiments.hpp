// experiments.hpp: cooling-power optimization and the parameter studies
// built on it: stage sweeps, random COP histograms and power/efficiency
// characteristic curves.
//
// Anything taking `threads` evaluates independent items concurrently and
// collects them by index; 0 means one thread per hardware core. Results do
// not depend on the thread count.

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qhp/nonideal_fridge.hpp"
#include "qhp/pump_model.hpp"

namespace qhp {

inline constexpr std::uint64_t kDefaultSeed = 12345;

struct MaximizeOptions {
  int grid_points = 64;           // interior points of the coarse grid
  double relative_width = 1e-6;   // golden-section stop, relative to the interval
};

struct ScalarMaximum {
  double x = 0.0;
  double value = 0.0;
  double grid_x = 0.0;      // best coarse-grid point
  double grid_value = 0.0;
  int evaluations = 0;
};

// Maximizes f over the open interval (lo, hi): f is sampled at
// lo + (hi - lo) k / (grid_points + 1), then the two cells around the best
// sample are searched by golden section. The grid winner is returned if the
// refinement does not beat it.
ScalarMaximum maximize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                                   const MaximizeOptions& options = {});

struct Optimum {
  double omega_c_star = 0.0;
  double q_c_max = 0.0;
  double eps_star = 0.0;
  double eps_ratio = 0.0;   // eps_star / Carnot COP
  double window_max = 0.0;  // upper edge of the searched omega_c interval
  double carnot = 0.0;      // Carnot COP at the optimum
  int evaluations = 0;
};

// Cooling power maximized over omega_c at the template's fixed omega_h. The
// template's omega_c is ignored. For squeezed or saturated work baths the
// Carnot COP uses the effective work temperature at the optimal omega_w.
// Throws SolverError{empty_window} if the window has no interior.
Optimum maximize_cooling_power(const PumpConfig& tmpl, const MaximizeOptions& options = {});

enum class StageVariant { plain, squeezed, saturated };

std::string_view to_string(StageVariant v) noexcept;

struct VariantSpec {
  StageVariant kind = StageVariant::plain;
  double squeeze_r = 0.0;  // squeezed only
};

PumpConfig apply_variant(PumpConfig cfg, const VariantSpec& variant);

struct StageRow {
  int n_levels = 0;
  VariantSpec variant;
  Optimum optimum;
};

// One optimum per (N, variant), ordered by N then by variant position.
std::vector<StageRow> sweep_stages(const PumpConfig& params, int n_min, int n_max,
                                   const std::vector<VariantSpec>& variants, int threads = 0);

struct LogRange {
  double lo = 1.0;
  double hi = 1.0;
};

// Sampling distributions for random fridges. All ranges are log-uniform;
// N is uniform on [n_min, n_max]. gamma_factor multiplies
// min(omega_c_max, T_c) and is drawn per bath.
struct SampleRanges {
  LogRange t_cold{1.0, 1e2};
  LogRange hot_over_cold{2.0, 1e2};
  LogRange work_over_hot{2.0, 1e2};
  LogRange omega_h_over_cold{1e-1, 1e1};
  LogRange gamma_factor{1e-5, 1e-2};
  int n_min = 3;
  int n_max = 10;
  std::uint64_t seed = kDefaultSeed;
  int max_attempts = 1000;  // draws per sample before it is given up
};

void validate(const SampleRanges& ranges);

// Deterministic stream for sample `index`: independent of every other index.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index);
  double uniform();  // [0, 1), 53 random bits
  double log_uniform(const LogRange& r);
  int uniform_int(int lo, int hi);  // inclusive

 private:
  std::mt19937_64 engine_;
};

struct HistogramSample {
  std::uint64_t index = 0;
  PumpConfig config;
  Optimum optimum;
};

struct Histogram {
  std::vector<HistogramSample> samples;  // ordered by index; failed indices absent
  std::uint64_t rejected = 0;            // draws discarded for weak-coupling violations
  std::uint64_t failed = 0;              // samples with no accepted draw or a solver failure
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double bin_width = 0.01;
  std::vector<std::uint64_t> bins;  // counts of eps_ratio in [k w, (k+1) w), k < 1/w
};

// Draws one fridge from the stream; rejected draws are added to `rejected`.
// Returns false if max_attempts draws were all rejected.
bool draw_fridge(const SampleRanges& ranges, SampleStream& stream, PumpConfig& out, std::uint64_t& rejected);

Histogram cop_histogram(const SampleRanges& ranges, std::uint64_t n_samples, int threads = 0);

// Fixed work frequency, plain thermal baths; omega_h = omega_c + omega_w for
// both systems.
struct ComparisonParams {
  double omega_w = 60.0;
  BathSpec work{Bath::work, 130.0, 1e-3};
  BathSpec hot{Bath::hot, 60.0, 1e-3};
  BathSpec cold{Bath::cold, 5.0, 1e-3};
  double g = 0.1;
  int ideal_levels = 8;
  DissipatorBasis basis = DissipatorBasis::local;

  Temperatures temperatures() const { return {work.temperature, hot.temperature, cold.temperature}; }
  PumpConfig ideal(double omega_c) const;
  ThreeQubitConfig three_qubit(double omega_c) const;
  // Largest omega_c with omega_c / omega_w <= Carnot COP.
  double window_max() const;
};

enum class CurveSystem { ideal, three_qubit };

std::string_view to_string(CurveSystem s) noexcept;

struct PerformancePoint {
  double omega_c = 0.0;
  double q_c = 0.0;
  double eps = 0.0;
  double eps_over_carnot = 0.0;
};

// omega_c = window_max * k / (n_points + 1), k = 1 .. n_points.
std::vector<PerformancePoint> characteristic_curve(CurveSystem system, const ComparisonParams& params,
                                                   int n_points, int threads = 0);

// A curve is closed when it turns back: eps/eps_C peaks before the last
// point, the last point lies at least 5% below that peak and carries under a
// quarter of the peak power. Monotone (ideal) curves are open.
bool curve_is_closed(const std::vector<PerformancePoint>& curve);

Optimum maximize_fixed_work(CurveSystem system, const ComparisonParams& params,
                            const MaximizeOptions& options = {});

struct Comparison {
  Optimum ideal;
  Optimum three_qubit;
  double power_ratio = 0.0;  // ideal.q_c_max / three_qubit.q_c_max
  std::vector<PerformancePoint> ideal_curve;
  std::vector<PerformancePoint> three_qubit_curve;
  bool three_qubit_closed = false;
  double three_qubit_max_eps_ratio = 0.0;
};

Comparison compare_ideal_three_qubit(const ComparisonParams& params, int n_points, int threads = 0);

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception by index is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace qhp
