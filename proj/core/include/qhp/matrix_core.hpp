// matrix_core.hpp: dense complex operators, superoperators and the two
// generic solvers (stationary kernel, explicit propagation).
//
// Vectorization convention: column stacking. Element (i, j) of an N x N
// matrix lives at slot j*N + i, so that vec(A rho B) = (B^T kron A) vec(rho).

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qhp {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Generators are held in extended precision. Population rows add up rates
// that span many decades, and heat currents are small differences of large
// fluxes; assembling in double loses the exact cancellation between the
// total generator and the sum of its parts.
using ExtReal = long double;
using ExtComplex = std::complex<long double>;
using ExtMatrix = Eigen::Matrix<ExtComplex, Eigen::Dynamic, Eigen::Dynamic>;
using ExtVector = Eigen::Matrix<ExtComplex, Eigen::Dynamic, 1>;
using ExtSparse = Eigen::SparseMatrix<ExtComplex>;

// Linear map on N x N density matrices, stored as a sparse N^2 x N^2 matrix
// acting on column-stacked vectors.
struct SuperOp {
  Index dim = 0;
  ExtSparse matrix;

  static SuperOp zero(Index dim);

  SuperOp& operator+=(const SuperOp& other);
  ExtMatrix dense() const { return ExtMatrix(matrix); }
  ExtComplex at(Index row, Index col) const { return matrix.coeff(row, col); }
};

SuperOp operator+(SuperOp lhs, const SuperOp& rhs);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CVector vectorize(const CMatrix& m);
CMatrix devectorize(const CVector& v, Index n);
CMatrix devectorize(const ExtVector& v, Index n);

// op += coeff * (rho -> left * rho * right). Only non-zero entries of the
// factors are visited, so sparse jump operators cost O(nnz^2). Entries that
// cancel to exactly zero are dropped.
void add_sandwich(SuperOp& op, ExtComplex coeff, const CMatrix& left, const CMatrix& right);

// coeff * (rho -> left * rho * right)
struct Sandwich {
  ExtComplex coeff;
  CMatrix left;
  CMatrix right;
};

// Sum of sandwich terms on dim x dim matrices, assembled in one pass.
SuperOp sum_of_sandwiches(Index dim, const std::vector<Sandwich>& terms);

// rho -> -i [h, rho]
SuperOp commutator_superop(const CMatrix& h);

ExtVector apply(const SuperOp& op, const ExtVector& v);
ExtMatrix apply(const SuperOp& op, const CMatrix& rho);

double inf_norm(const SuperOp& op);

// max_j |sum_i L(ii, j)|: how far the trace functional is from annihilating op.
double trace_defect(const SuperOp& op);

struct KernelOptions {
  // Singular values below degeneracy_ratio * sigma_max count as zero.
  double degeneracy_ratio = 1e-9;
  // Accepted ||L v||_inf / ||L||_inf.
  double residual_tolerance = 1e-10;
};

enum class KernelPath { block_replacement, singular_vector };

struct KernelSolution {
  ExtVector vector;       // unit trace once devectorized
  double residual = 0.0;  // ||L v||_inf / ||L||_inf
  KernelPath path = KernelPath::block_replacement;
  Index block_size = 0;   // size of the trace-carrying block that was solved
};

// Unique stationary state of a trace-preserving generator.
//
// Primary path: split the generator into the connected blocks of its sparsity
// pattern, replace one population row of the block that carries the trace with
// the trace constraint and solve by LU. The remaining blocks must be
// non-singular, which makes their share of the kernel zero. If the LU is
// singular or the residual misses tolerance the smallest right singular
// vector of the whole generator is used instead; that path doubles as the
// uniqueness diagnostic.
//
// Throws SolverError{degenerate_kernel} if the stationary state is not
// unique, {no_kernel} if L has no null vector, {not_converged} if neither
// path meets the residual tolerance.
KernelSolution stationary_vector(const SuperOp& l, const KernelOptions& options = {});

// dt = 0.1 / ||L||_inf
double default_time_step(const SuperOp& l);

// Classical fourth-order Runge-Kutta with fixed step dt, repeated `steps`
// times. One RK4 step is the polynomial map P = sum_{k<=4} (dt L)^k / k!, so
// P^steps is formed by repeated squaring; the result is identical to stepping
// but long horizons cost O(log steps) matrix products.
//
// The caller keeps dt * ||L|| inside the RK4 stability region; halving dt and
// doubling steps must not change the result beyond the accuracy sought.
CMatrix propagate(const SuperOp& l, const CMatrix& rho0, double dt, std::uint64_t steps);

}  // namespace qhp
