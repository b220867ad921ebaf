#include "qhp/steady_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qhp/errors.hpp"

namespace qhp {

std::string_view to_string(OperatingMode mode) noexcept {
  switch (mode) {
    case OperatingMode::chiller: return "chiller";
    case OperatingMode::heat_transformer: return "heat_transformer";
    case OperatingMode::boundary: return "boundary";
    case OperatingMode::equilibrium: return "equilibrium";
    case OperatingMode::other: return "other";
  }
  return "?";
}

double HeatCurrents::operator[](Bath b) const {
  switch (b) {
    case Bath::work: return work;
    case Bath::hot: return hot;
    case Bath::cold: return cold;
  }
  return 0.0;
}

double HeatCurrents::max_abs() const { return std::max({std::abs(work), std::abs(hot), std::abs(cold)}); }

const SuperOp& GeneratorParts::dissipator(Bath b) const {
  switch (b) {
    case Bath::work: return work;
    case Bath::hot: return hot;
    case Bath::cold: return cold;
  }
  return work;
}

SuperOp GeneratorParts::total() const { return unitary + work + hot + cold; }

SuperOp build_dissipator(const CMatrix& jump, const RatePair& rates) {
  const Index n = jump.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix raise = jump.adjoint();
  const ExtReal down = rates.down;
  const ExtReal up = rates.up;
  std::vector<Sandwich> terms;
  if (down != 0.0L) {
    const CMatrix occupied = raise * jump;
    terms.push_back({down, jump, raise});
    terms.push_back({-down / 2, occupied, id});
    terms.push_back({-down / 2, id, occupied});
  }
  if (up != 0.0L) {
    const CMatrix empty = jump * raise;
    terms.push_back({up, raise, jump});
    terms.push_back({-up / 2, empty, id});
    terms.push_back({-up / 2, id, empty});
  }
  return sum_of_sandwiches(n, terms);
}

GeneratorParts build_generator_parts(const PumpConfig& cfg) {
  validate_structure(cfg);
  GeneratorParts parts;
  parts.hamiltonian = build_hamiltonian(cfg);
  parts.unitary = commutator_superop(parts.hamiltonian);
  for (Bath b : kAllBaths) {
    SuperOp d = build_dissipator(build_jump_operator(cfg, b), decay_rates(cfg.bath(b), cfg.frequency(b)));
    switch (b) {
      case Bath::work: parts.work = std::move(d); break;
      case Bath::hot: parts.hot = std::move(d); break;
      case Bath::cold: parts.cold = std::move(d); break;
    }
  }
  return parts;
}

SuperOp build_liouvillian(const PumpConfig& cfg) { return build_generator_parts(cfg).total(); }

namespace {

// Quadruple precision for the classical path below.
__extension__ using Quad = __float128;

// Rounding floor for currents from a generator of norm `l_norm`, Hamiltonian
// `h` and a working precision `eps`.
double current_floor(double l_norm, const CMatrix& h, double eps) {
  const double h_scale = h.cwiseAbs().rowwise().sum().maxCoeff();
  return 64.0 * eps * l_norm * std::max(h_scale, 1.0);
}

OperatingMode classify(const HeatCurrents& q, double floor) {
  if (q.max_abs() <= floor) return OperatingMode::equilibrium;
  if (q.cold > 0 && q.work > 0 && q.hot < 0) return OperatingMode::chiller;
  if (q.cold < 0 && q.work < 0 && q.hot > 0) return OperatingMode::heat_transformer;
  return OperatingMode::other;
}

struct Solved {
  SteadySolution solution;
  ExtVector state;
  double floor = 0.0;       // solver rounding, for the first-law check
  double zero_level = 0.0;  // currents below this are zero given double inputs
  // <k| L_alpha rho |k> per bath, indexed by static_cast<int>(Bath)
  std::array<std::vector<double>, 3> population_rates;
};

// True when no part couples populations with coherences and the population
// entries are real with non-negative off-diagonals: the populations then
// obey a closed classical rate equation.
bool is_classical(const GeneratorParts& parts) {
  const Index n = parts.hamiltonian.rows();
  const auto population = [n](Index i) { return i % (n + 1) == 0; };
  for (const SuperOp* op : {&parts.unitary, &parts.work, &parts.hot, &parts.cold}) {
    for (Index k = 0; k < op->matrix.outerSize(); ++k) {
      for (ExtSparse::InnerIterator it(op->matrix, k); it; ++it) {
        if (it.value() == ExtComplex(0)) continue;
        if (population(it.row()) != population(k)) return false;
        if (!population(k)) continue;
        if (it.value().imag() != 0) return false;
        if (it.row() != k && it.value().real() < 0) return false;
      }
    }
  }
  return true;
}

// Dense n x n, row major.
class QuadMatrix {
 public:
  explicit QuadMatrix(Index n = 0) : n_(n), a_(static_cast<std::size_t>(n * n), Quad(0)) {}
  Quad& operator()(Index i, Index j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  Quad operator()(Index i, Index j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  Index size() const { return n_; }

 private:
  Index n_;
  std::vector<Quad> a_;
};

// Transition rates j -> i of one part, W(i, j) for i != j. The diagonal is
// rebuilt from the off-diagonal column sums so it carries no assembly rounding.
QuadMatrix rate_matrix(const SuperOp& op, Index n) {
  QuadMatrix w(n);
  for (Index j = 0; j < n; ++j) {
    Quad out = 0;
    for (ExtSparse::InnerIterator it(op.matrix, j * (n + 1)); it; ++it) {
      const Index i = it.row() / (n + 1);
      if (i == j || it.value().real() == 0) continue;
      w(i, j) = static_cast<Quad>(it.value().real());
      out += w(i, j);
    }
    w(j, j) = -out;
  }
  return w;
}

// Stationary distribution by Grassmann-Taksar-Heyman state reduction, which
// never subtracts and so keeps componentwise relative accuracy however stiff
// the rates are. Returns false if the chain is reducible.
bool gth_stationary(const QuadMatrix& w, std::vector<Quad>& p) {
  const Index n = w.size();
  // r(i, j): rate i -> j
  QuadMatrix r(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) r(i, j) = i == j ? Quad(0) : w(j, i);
  }
  for (Index k = n - 1; k >= 1; --k) {
    Quad out = 0;
    for (Index j = 0; j < k; ++j) out += r(k, j);
    if (!(out > 0)) return false;
    for (Index i = 0; i < k; ++i) {
      if (r(i, k) == 0) continue;
      const Quad f = r(i, k) / out;
      r(i, k) = f;
      for (Index j = 0; j < k; ++j) {
        if (i != j && r(k, j) != 0) r(i, j) += f * r(k, j);
      }
    }
  }
  p.assign(static_cast<std::size_t>(n), 0);
  p[0] = 1;
  Quad total = 1;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (r(i, j) != 0) p[j] += p[i] * r(i, j);
    }
    total += p[j];
  }
  for (auto& x : p) x /= total;
  return true;
}

// Populations and currents of a classical generator in quadruple precision.
// Net fluxes on fast transitions are tiny differences of large gross fluxes;
// extended precision loses them once the ratio nears 1e10.
bool solve_classical(const GeneratorParts& parts, Solved& out, ExtReal q[3]) {
  const Index n = parts.hamiltonian.rows();
  std::array<QuadMatrix, 3> w;
  QuadMatrix total(n);
  for (Bath b : kAllBaths) {
    auto& wb = w[static_cast<int>(b)];
    wb = rate_matrix(parts.dissipator(b), n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (wb(i, j) != 0) total(i, j) += wb(i, j);
      }
    }
  }
  std::vector<Quad> p;
  if (!gth_stationary(total, p)) return false;

  out.state.setZero();
  for (Index k = 0; k < n; ++k) out.state(k * (n + 1)) = static_cast<ExtReal>(p[k]);
  for (Bath b : kAllBaths) {
    const auto& wb = w[static_cast<int>(b)];
    auto& rates = out.population_rates[static_cast<int>(b)];
    rates.assign(static_cast<std::size_t>(n), 0.0);
    Quad current = 0;
    for (Index i = 0; i < n; ++i) {
      Quad flow = 0;
      for (Index j = 0; j < n; ++j) {
        if (wb(i, j) != 0) flow += wb(i, j) * p[j];
      }
      rates[i] = static_cast<double>(flow);
      current += static_cast<Quad>(parts.hamiltonian(i, i).real()) * flow;
    }
    q[static_cast<int>(b)] = static_cast<ExtReal>(current);
  }
  return true;
}

struct QuadComplex {
  Quad re = 0;
  Quad im = 0;
};

using QuadVector = std::vector<QuadComplex>;

QuadVector quad_apply(const SuperOp& l, const QuadVector& x) {
  QuadVector y(x.size());
  for (Index k = 0; k < l.matrix.outerSize(); ++k) {
    const QuadComplex v = x[k];
    for (ExtSparse::InnerIterator it(l.matrix, k); it; ++it) {
      const Quad re = it.value().real(), im = it.value().imag();
      y[it.row()].re += re * v.re - im * v.im;
      y[it.row()].im += re * v.im + im * v.re;
    }
  }
  return y;
}

// Sum of the parts applied in quadruple precision; total() is rounded.
QuadVector quad_apply(const GeneratorParts& parts, const QuadVector& x) {
  QuadVector y = quad_apply(parts.unitary, x);
  for (Bath b : kAllBaths) {
    const QuadVector yb = quad_apply(parts.dissipator(b), x);
    for (std::size_t k = 0; k < y.size(); ++k) {
      y[k].re += yb[k].re;
      y[k].im += yb[k].im;
    }
  }
  return y;
}

// Mixed-precision refinement of a stationary vector: residuals of the exact
// parts in quadruple precision, corrections from one extended-precision LU of
// the generator with its first population row replaced by the trace. Returns
// false if that system is singular.
bool refine_stationary(const GeneratorParts& parts, const SuperOp& l, const ExtVector& start, QuadVector& x) {
  const Index dim = l.dim;
  ExtMatrix a = l.dense();
  a.row(0).setZero();
  for (Index k = 0; k < dim; ++k) a(0, k * (dim + 1)) = 1;
  const Eigen::FullPivLU<ExtMatrix> lu(a);
  if (!lu.isInvertible()) return false;

  x.assign(start.size(), {});
  for (Index k = 0; k < start.size(); ++k) x[k] = {start(k).real(), start(k).imag()};
  for (int sweep = 0; sweep < 4; ++sweep) {
    const QuadVector r = quad_apply(parts, x);
    Quad trace = 0;
    for (Index k = 0; k < dim; ++k) trace += x[k * (dim + 1)].re;
    ExtVector rhs(start.size());
    for (Index k = 0; k < rhs.size(); ++k) rhs(k) = ExtComplex(-static_cast<ExtReal>(r[k].re), -static_cast<ExtReal>(r[k].im));
    rhs(0) = static_cast<ExtReal>(1 - trace);
    const ExtVector dv = lu.solve(rhs);
    ExtReal step = 0, size = 0;
    for (Index k = 0; k < dv.size(); ++k) {
      x[k].re += dv(k).real();
      x[k].im += dv(k).imag();
      step = std::max(step, std::abs(dv(k)));
      size = std::max(size, static_cast<ExtReal>(std::max(x[k].re, -x[k].re)));
    }
    if (step <= 1e-30L * size) break;
  }
  return true;
}

// Currents of a general generator from the refined state.
bool solve_refined(const GeneratorParts& parts, const SuperOp& total, Solved& out, ExtReal q[3], double& residual) {
  QuadVector x;
  if (!refine_stationary(parts, total, out.state, x)) return false;
  const Index n = parts.hamiltonian.rows();
  for (Index k = 0; k < out.state.size(); ++k) {
    out.state(k) = ExtComplex(static_cast<ExtReal>(x[k].re), static_cast<ExtReal>(x[k].im));
  }
  for (Bath b : kAllBaths) {
    const QuadVector y = quad_apply(parts.dissipator(b), x);
    auto& rates = out.population_rates[static_cast<int>(b)];
    rates.assign(n, 0.0);
    for (Index k = 0; k < n; ++k) rates[k] = static_cast<double>(y[k * (n + 1)].re);
    Quad acc = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const Complex h = parts.hamiltonian(i, j);
        if (h == Complex(0.0, 0.0)) continue;
        const QuadComplex v = y[j + i * n];
        acc += static_cast<Quad>(h.real()) * v.re - static_cast<Quad>(h.imag()) * v.im;
      }
    }
    q[static_cast<int>(b)] = static_cast<ExtReal>(acc);
  }
  Quad worst = 0;
  for (const QuadComplex& v : quad_apply(parts, x)) worst = std::max({worst, v.re, -v.re, v.im, -v.im});
  residual = static_cast<double>(worst) / inf_norm(total);
  return true;
}

// Strict column diagonal dominance of the coherence block, which proves it
// non-singular. With the coherences closed under the generator the kernel
// then has none.
bool coherences_dominant(const SuperOp& l) {
  const Index n = l.dim;
  for (Index k = 0; k < l.matrix.outerSize(); ++k) {
    if (k % (n + 1) == 0) continue;
    ExtReal diagonal = 0, rest = 0;
    for (ExtSparse::InnerIterator it(l.matrix, k); it; ++it) {
      const ExtReal m = std::sqrt(std::norm(it.value()));
      if (it.row() == k) {
        diagonal = m;
      } else {
        rest += m;
      }
    }
    if (!(rest < diagonal * (1 - 1e-9L))) return false;
  }
  return true;
}

Solved solve_parts(const GeneratorParts& parts, const Temperatures& temps, const Tolerances& tol) {
  const SuperOp total = parts.total();
  const Index n = parts.hamiltonian.rows();
  const double norm = inf_norm(total);
  const bool classical = is_classical(parts);

  Solved out;
  out.state = ExtVector::Zero(n * n);
  ExtReal q[3];
  bool done = classical && coherences_dominant(total) && solve_classical(parts, out, q);
  double residual = 0.0;
  if (!done) {
    KernelOptions opts;
    opts.degeneracy_ratio = tol.degeneracy_ratio;
    opts.residual_tolerance = tol.kernel_residual;
    KernelSolution kernel = stationary_vector(total, opts);
    out.state = std::move(kernel.vector);
    residual = kernel.residual;
    done = classical && solve_classical(parts, out, q);
    if (!done && !solve_refined(parts, total, out, q, residual)) {
      throw SolverError(SolverErrc::not_converged, "trace-constrained generator is singular");
    }
  }
  if (classical && done) {
    residual = static_cast<double>(std::sqrt((total.matrix * out.state).cwiseAbs2().maxCoeff())) / norm;
  }
  const double eps = std::ldexp(1.0, -112);
  out.floor = current_floor(norm, parts.hamiltonian, eps);
  out.zero_level = current_floor(norm, parts.hamiltonian, std::numeric_limits<double>::epsilon());

  SteadySolution& s = out.solution;
  const Index dim = parts.hamiltonian.rows();
  s.rho = devectorize(out.state, dim);
  s.q.work = static_cast<double>(q[static_cast<int>(Bath::work)]);
  s.q.hot = static_cast<double>(q[static_cast<int>(Bath::hot)]);
  s.q.cold = static_cast<double>(q[static_cast<int>(Bath::cold)]);

  const double total_flow = static_cast<double>(q[0] + q[1] + q[2]);
  const double largest = s.q.max_abs();
  s.residuals["kernel_residual"] = residual;
  s.residuals["first_law"] = largest > 0.0 ? std::abs(total_flow) / largest : 0.0;
  if (s.residuals["kernel_residual"] > tol.kernel_residual) {
    throw SolverError(SolverErrc::not_converged, "kernel residual exceeds tolerance");
  }
  if (std::abs(total_flow) > std::max(tol.first_law * largest, out.floor)) {
    std::ostringstream os;
    os << "first-law residual " << std::abs(total_flow) << " against currents of size " << largest;
    throw SolverError(SolverErrc::not_converged, os.str());
  }

  s.cop = s.q.work != 0.0 ? s.q.cold / s.q.work : std::numeric_limits<double>::quiet_NaN();
  const auto flow_over = [](double flow, double t) { return std::isinf(t) ? 0.0 : flow / t; };
  s.entropy_rate = -(flow_over(s.q.work, temps.work) + flow_over(s.q.hot, temps.hot) +
                     flow_over(s.q.cold, temps.cold));
  s.mode = classify(s.q, out.zero_level);
  return out;
}

}  // namespace

SteadySolution solve_generator(const GeneratorParts& parts, const Temperatures& temps, const Tolerances& tol) {
  return solve_parts(parts, temps, tol).solution;
}

namespace {

Solved solve_pump(const PumpConfig& cfg, const GeneratorParts& parts, const Tolerances& tol) {
  const Temperatures temps = effective_temperatures(cfg);
  Solved solved = solve_parts(parts, temps, tol);
  SteadySolution& s = solved.solution;

  const double ideal_ratio = cfg.omega_c / cfg.omega_w();
  s.residuals["ideality_cold_work"] =
      s.q.work != 0.0 ? std::abs(std::abs(s.q.cold / s.q.work) / ideal_ratio - 1.0) : 0.0;

  const bool ordered = temps.work >= temps.hot && temps.hot > temps.cold;
  if (ordered) {
    const double edge = effective_window_max(cfg);
    if (std::abs(cfg.omega_c - edge) <= 1e-12 * edge) s.mode = OperatingMode::boundary;
  }
  return solved;
}

}  // namespace

SteadySolution solve(const PumpConfig& cfg, const Tolerances& tol) {
  return solve_pump(cfg, build_generator_parts(cfg), tol).solution;
}

CurrentDecomposition heat_currents_decomposed(const PumpConfig& cfg, const Tolerances& tol,
                                              double relative_tolerance) {
  const GeneratorParts parts = build_generator_parts(cfg);
  Solved solved = solve_pump(cfg, parts, tol);
  const Index n = cfg.n_levels;

  CurrentDecomposition out;
  out.trace = solved.solution.q;
  const auto add = [&](Bath b, Index level, double weight) {
    CurrentTerm term;
    term.bath = b;
    term.level = level;
    term.weight = weight;
    term.population_rate = solved.population_rates[static_cast<int>(b)][level];
    out.terms.push_back(term);
  };

  // Level labels below are 1-based kets; `ket - 1` is the matrix index.
  for (Index k = 1; k <= (n + 1) / 2 - 1; ++k) add(Bath::work, 2 * k, cfg.omega_w());
  for (Index ket = 3; ket <= n; ++ket) add(Bath::hot, ket - 1, cfg.omega_h * static_cast<double>((ket + 1) / 2 - 1));
  for (Index k = 1; k <= n / 2; ++k) add(Bath::cold, 2 * k - 1, cfg.omega_c);

  for (const CurrentTerm& t : out.terms) {
    switch (t.bath) {
      case Bath::work: out.summed.work += t.value(); break;
      case Bath::hot: out.summed.hot += t.value(); break;
      case Bath::cold: out.summed.cold += t.value(); break;
    }
  }

  const double scale = std::max(out.trace.max_abs(), solved.floor);
  for (Bath b : kAllBaths) {
    if (std::abs(out.summed[b] - out.trace[b]) > relative_tolerance * scale) {
      std::ostringstream os;
      os << to_string(b) << " current: per-level sum " << out.summed[b] << " differs from trace formula "
         << out.trace[b];
      throw SolverError(SolverErrc::not_converged, os.str());
    }
  }
  out.solution = std::move(solved.solution);
  return out;
}

RateSolution pauli_rate_oracle(const PumpConfig& cfg) {
  validate_structure(cfg);
  using ExtReal2 = Eigen::Matrix<ExtReal, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = cfg.n_levels;
  ExtReal2 rates = ExtReal2::Zero(n, n);
  for (Bath b : kAllBaths) {
    const RatePair r = decay_rates(cfg.bath(b), cfg.frequency(b));
    for (const Transition& t : transitions(cfg.n_levels, b)) {
      rates(t.lower, t.upper) += r.down;
      rates(t.upper, t.upper) -= r.down;
      rates(t.upper, t.lower) += r.up;
      rates(t.lower, t.lower) -= r.up;
    }
  }
  // Replace the first balance equation by normalization.
  ExtReal2 system = rates;
  system.row(0).setOnes();
  Eigen::Matrix<ExtReal, Eigen::Dynamic, 1> rhs = Eigen::Matrix<ExtReal, Eigen::Dynamic, 1>::Zero(n);
  rhs(0) = 1;
  Eigen::FullPivLU<ExtReal2> lu(system);
  if (!lu.isInvertible()) {
    throw SolverError(SolverErrc::degenerate_kernel, "rate matrix has more than one stationary distribution");
  }
  const Eigen::Matrix<ExtReal, Eigen::Dynamic, 1> p = lu.solve(rhs);

  RateSolution out;
  out.populations = p.cast<double>();
  ExtReal q[3] = {0, 0, 0};
  for (Bath b : kAllBaths) {
    const RatePair r = decay_rates(cfg.bath(b), cfg.frequency(b));
    auto& fluxes = out.fluxes[b];
    for (const Transition& t : transitions(cfg.n_levels, b)) {
      const ExtReal flux = static_cast<ExtReal>(r.up) * p(t.lower) - static_cast<ExtReal>(r.down) * p(t.upper);
      fluxes.push_back(static_cast<double>(flux));
      q[static_cast<int>(b)] += static_cast<ExtReal>(cfg.frequency(b)) * flux;
    }
  }
  out.q.work = static_cast<double>(q[static_cast<int>(Bath::work)]);
  out.q.hot = static_cast<double>(q[static_cast<int>(Bath::hot)]);
  out.q.cold = static_cast<double>(q[static_cast<int>(Bath::cold)]);
  return out;
}

}  // namespace qhp
