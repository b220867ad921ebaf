#include "qhp/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhp/errors.hpp"

namespace qhp {

const char* to_string(SolverErrc code) noexcept {
  switch (code) {
    case SolverErrc::degenerate_kernel: return "DegenerateKernel";
    case SolverErrc::no_kernel: return "NoKernel";
    case SolverErrc::not_converged: return "NonConverged";
    case SolverErrc::empty_window: return "EmptyWindow";
  }
  return "SolverError";
}

SuperOp SuperOp::zero(Index dim) {
  SuperOp op;
  op.dim = dim;
  op.matrix.resize(dim * dim, dim * dim);
  return op;
}

SuperOp& SuperOp::operator+=(const SuperOp& other) {
  if (other.dim != dim) {
    throw std::invalid_argument("SuperOp dimension mismatch");
  }
  matrix += other.matrix;
  matrix.prune([](Index, Index, const ExtComplex& v) { return v != ExtComplex(0); });
  return *this;
}

SuperOp operator+(SuperOp lhs, const SuperOp& rhs) {
  lhs += rhs;
  return lhs;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vectorize(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("vectorize: matrix must be square");
  }
  return Eigen::Map<const CVector>(m.data(), m.size());  // Eigen is column-major
}

CMatrix devectorize(const CVector& v, Index n) {
  if (n <= 0 || v.size() != n * n) {
    throw std::invalid_argument("devectorize: length " + std::to_string(v.size()) +
                                " does not match dimension " + std::to_string(n));
  }
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

CMatrix devectorize(const ExtVector& v, Index n) {
  CVector d = v.cast<Complex>();
  return devectorize(d, n);
}

namespace {

struct Entry {
  Index row;
  Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const CMatrix& m) {
  std::vector<Entry> out;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != Complex(0.0, 0.0)) out.push_back({i, j, m(i, j)});
    }
  }
  return out;
}

ExtComplex ext(Complex z) { return {static_cast<ExtReal>(z.real()), static_cast<ExtReal>(z.imag())}; }

}  // namespace

namespace {

// (A rho B)_{ij} = sum_{kl} A_ik rho_kl B_lj  ->  L(i + jn, k + ln) += A_ik B_lj
void append_sandwich(std::vector<Eigen::Triplet<ExtComplex>>& terms, Index n, ExtComplex coeff,
                     const CMatrix& left, const CMatrix& right) {
  if (left.rows() != n || left.cols() != n || right.rows() != n || right.cols() != n) {
    throw std::invalid_argument("sandwich operator shape does not match superoperator");
  }
  const auto a = nonzeros(left);
  const auto b = nonzeros(right);
  for (const auto& ea : a) {
    const ExtComplex ca = coeff * ext(ea.value);
    for (const auto& eb : b) {
      terms.emplace_back(ea.row + eb.col * n, ea.col + eb.row * n, ca * ext(eb.value));
    }
  }
}

void drop_zeros(ExtSparse& m) {
  m.prune([](Index, Index, const ExtComplex& v) { return v != ExtComplex(0); });
}

}  // namespace

void add_sandwich(SuperOp& op, ExtComplex coeff, const CMatrix& left, const CMatrix& right) {
  op += sum_of_sandwiches(op.dim, {{coeff, left, right}});
}

SuperOp sum_of_sandwiches(Index dim, const std::vector<Sandwich>& terms) {
  std::vector<Eigen::Triplet<ExtComplex>> entries;
  for (const Sandwich& t : terms) append_sandwich(entries, dim, t.coeff, t.left, t.right);
  SuperOp op = SuperOp::zero(dim);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  drop_zeros(op.matrix);
  return op;
}

SuperOp commutator_superop(const CMatrix& h) {
  const Index n = h.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  return sum_of_sandwiches(n, {{ExtComplex(0.0L, -1.0L), h, id}, {ExtComplex(0.0L, 1.0L), id, h}});
}

ExtVector apply(const SuperOp& op, const ExtVector& v) { return op.matrix * v; }

ExtMatrix apply(const SuperOp& op, const CMatrix& rho) {
  if (rho.rows() != op.dim || rho.cols() != op.dim) {
    throw std::invalid_argument("apply: state shape does not match superoperator");
  }
  ExtVector v = vectorize(rho).cast<ExtComplex>();
  ExtVector out = op.matrix * v;
  return Eigen::Map<const ExtMatrix>(out.data(), op.dim, op.dim);
}

double inf_norm(const SuperOp& op) {
  std::vector<ExtReal> rows(static_cast<std::size_t>(op.matrix.rows()), 0.0L);
  for (Index k = 0; k < op.matrix.outerSize(); ++k) {
    for (ExtSparse::InnerIterator it(op.matrix, k); it; ++it) rows[it.row()] += std::sqrt(std::norm(it.value()));
  }
  return rows.empty() ? 0.0 : static_cast<double>(*std::max_element(rows.begin(), rows.end()));
}

double trace_defect(const SuperOp& op) {
  const Index n = op.dim;
  ExtReal worst = 0;
  for (Index col = 0; col < op.matrix.outerSize(); ++col) {
    ExtComplex s = 0;
    for (ExtSparse::InnerIterator it(op.matrix, col); it; ++it) {
      if (it.row() % (n + 1) == 0) s += it.value();
    }
    worst = std::max(worst, std::abs(s));
  }
  return static_cast<double>(worst);
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }
  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<Index> parent_;
};

std::vector<std::vector<Index>> connected_blocks(const ExtSparse& m) {
  const Index n = m.rows();
  DisjointSets sets(n);
  for (Index j = 0; j < m.outerSize(); ++j) {
    for (ExtSparse::InnerIterator it(m, j); it; ++it) {
      if (it.row() != j && it.value() != ExtComplex(0)) sets.unite(it.row(), j);
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

ExtMatrix gather(const ExtSparse& m, const std::vector<Index>& idx, std::vector<Index>& local) {
  const Index k = static_cast<Index>(idx.size());
  for (Index r = 0; r < k; ++r) local[idx[r]] = r;
  ExtMatrix out = ExtMatrix::Zero(k, k);
  for (Index c = 0; c < k; ++c) {
    for (ExtSparse::InnerIterator it(m, idx[c]); it; ++it) {
      if (local[it.row()] >= 0) out(local[it.row()], c) = it.value();
    }
  }
  for (Index r = 0; r < k; ++r) local[idx[r]] = -1;
  return out;
}

// Pivots below this fraction of the largest one count as exact zeros.
constexpr ExtReal kPivotThreshold = 64 * std::numeric_limits<ExtReal>::epsilon();

ExtComplex trace_of(const ExtVector& v, Index dim) {
  ExtComplex t = 0;
  for (Index k = 0; k < dim; ++k) t += v(k + k * dim);
  return t;
}

double relative_residual(const SuperOp& l, const ExtVector& v, double norm) {
  const ExtVector r = l.matrix * v;
  return static_cast<double>(std::sqrt(r.cwiseAbs2().maxCoeff())) / norm;
}

// Returns false if the block structure cannot be used (singular trace block,
// unexpected layout); throws if the structure proves the kernel degenerate.
bool solve_by_blocks(const SuperOp& l, KernelSolution& out) {
  const Index dim = l.dim;
  const Index n = dim * dim;
  const auto blocks = connected_blocks(l.matrix);
  std::vector<Index> local(static_cast<std::size_t>(n), -1);

  std::vector<bool> is_population(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < dim; ++k) is_population[k + k * dim] = true;

  const std::vector<Index>* trace_block = nullptr;
  for (const auto& block : blocks) {
    const bool carries_trace = std::any_of(block.begin(), block.end(),
                                           [&](Index i) { return is_population[i]; });
    if (!carries_trace) continue;
    if (trace_block != nullptr) {
      // Each trace-carrying block preserves its own partial trace, so each
      // has its own stationary state.
      throw SolverError(SolverErrc::degenerate_kernel,
                        "generator splits into independent trace-preserving blocks");
    }
    trace_block = &block;
  }
  if (trace_block == nullptr) return false;

  for (const auto& block : blocks) {
    if (&block == trace_block) continue;
    if (block.size() == 1) {
      if (l.matrix.coeff(block[0], block[0]) == ExtComplex(0)) {
        throw SolverError(SolverErrc::degenerate_kernel, "traceless block of the generator is singular");
      }
      continue;
    }
    Eigen::FullPivLU<ExtMatrix> lu(gather(l.matrix, block, local));
    lu.setThreshold(kPivotThreshold);
    if (!lu.isInvertible()) {
      throw SolverError(SolverErrc::degenerate_kernel, "traceless block of the generator is singular");
    }
  }

  const auto& idx = *trace_block;
  const Index k = static_cast<Index>(idx.size());
  ExtMatrix a = gather(l.matrix, idx, local);
  Index replaced = -1;
  for (Index r = 0; r < k; ++r) {
    if (is_population[idx[r]]) {
      replaced = r;
      break;
    }
  }
  for (Index c = 0; c < k; ++c) a(replaced, c) = is_population[idx[c]] ? 1.0L : 0.0L;
  ExtVector rhs = ExtVector::Zero(k);
  rhs(replaced) = 1.0L;

  Eigen::FullPivLU<ExtMatrix> lu(a);
  lu.setThreshold(kPivotThreshold);
  if (!lu.isInvertible()) return false;
  ExtVector x = lu.solve(rhs);
  for (int sweep = 0; sweep < 2; ++sweep) {
    const ExtVector r = rhs - a * x;
    x += lu.solve(r);
  }
  if (!x.allFinite()) return false;

  out.vector = ExtVector::Zero(n);
  for (Index r = 0; r < k; ++r) out.vector(idx[r]) = x(r);
  out.vector /= trace_of(out.vector, dim);
  out.path = KernelPath::block_replacement;
  out.block_size = k;
  return true;
}

KernelSolution solve_by_svd(const SuperOp& l, const KernelOptions& options, double norm) {
  const Index dim = l.dim;
  const Index n = dim * dim;
  const CMatrix m = l.dense().cast<Complex>();
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cutoff = options.degeneracy_ratio * s(0);
  if (s(n - 1) > cutoff) {
    throw SolverError(SolverErrc::no_kernel, "smallest singular value " + std::to_string(s(n - 1)) +
                                                 " exceeds " + std::to_string(cutoff));
  }
  if (n >= 2 && s(n - 2) <= cutoff) {
    throw SolverError(SolverErrc::degenerate_kernel, "two singular values below " + std::to_string(cutoff));
  }
  KernelSolution out;
  out.vector = svd.matrixV().col(n - 1).cast<ExtComplex>();
  const ExtComplex t = trace_of(out.vector, dim);
  if (std::abs(t) < 1e-12L) {
    throw SolverError(SolverErrc::not_converged, "null vector has vanishing trace");
  }
  out.vector /= t;
  out.path = KernelPath::singular_vector;
  out.block_size = n;
  out.residual = relative_residual(l, out.vector, norm);
  return out;
}

}  // namespace

KernelSolution stationary_vector(const SuperOp& l, const KernelOptions& options) {
  const Index dim = l.dim;
  if (dim <= 0 || l.matrix.rows() != dim * dim || l.matrix.cols() != dim * dim) {
    throw std::invalid_argument("stationary_vector: malformed superoperator");
  }
  if (dim == 1) {
    KernelSolution one;
    one.vector = ExtVector::Ones(1);
    one.block_size = 1;
    return one;
  }
  const double norm = inf_norm(l);
  if (norm == 0.0) {
    throw SolverError(SolverErrc::degenerate_kernel, "generator is identically zero");
  }

  // The block argument relies on trace preservation; anything else goes
  // straight to the singular-value diagnostic.
  if (trace_defect(l) <= options.residual_tolerance * norm) {
    KernelSolution sol;
    if (solve_by_blocks(l, sol)) {
      sol.residual = relative_residual(l, sol.vector, norm);
      if (sol.residual <= options.residual_tolerance) return sol;
    }
  }

  KernelSolution sol = solve_by_svd(l, options, norm);
  if (sol.residual > options.residual_tolerance) {
    throw SolverError(SolverErrc::not_converged,
                      "kernel residual " + std::to_string(sol.residual) + " exceeds tolerance");
  }
  return sol;
}

double default_time_step(const SuperOp& l) {
  const double norm = inf_norm(l);
  return norm > 0.0 ? 0.1 / norm : 1.0;
}

CMatrix propagate(const SuperOp& l, const CMatrix& rho0, double dt, std::uint64_t steps) {
  const Index dim = l.dim;
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw std::invalid_argument("propagate: state shape does not match generator");
  }
  const Index n = dim * dim;
  const ExtMatrix id = ExtMatrix::Identity(n, n);
  const ExtMatrix hl = static_cast<ExtReal>(dt) * l.dense();

  // Horner form of I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24
  ExtMatrix step = id + hl / 4.0L;
  step = id + hl * step / 3.0L;
  step = id + hl * step / 2.0L;
  step = id + hl * step;

  ExtVector v = vectorize(rho0).cast<ExtComplex>();
  constexpr std::uint64_t kDirectSteps = 64;
  if (steps <= kDirectSteps) {
    for (std::uint64_t s = 0; s < steps; ++s) v = step * v;
  } else {
    ExtMatrix power = step;
    for (std::uint64_t remaining = steps; remaining != 0; remaining >>= 1) {
      if (remaining & 1U) v = power * v;
      if (remaining > 1) power = power * power;
    }
  }
  return devectorize(v, dim);
}

}  // namespace qhp
