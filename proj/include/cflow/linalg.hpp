#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cflow/sparse.hpp"

namespace cflow {

/// Raised when a factorization meets a zero (or structurally missing) pivot.
/// pivot() is the offending row in the original ordering, -1 if unknown.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, long pivot) : std::runtime_error(what), pivot_(pivot) {}
  long pivot() const { return pivot_; }

 private:
  long pivot_;
};

/// Raised when an iterative eigensolver exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Sparse direct factorization supporting repeated solves. Symmetric
/// matrices use a simplicial LDL^T with AMD ordering; indefinite ones
/// (saddle points) use supernodal LU with partial pivoting.
class Factorization {
 public:
  Factorization(const SparseMatrix& a, bool symmetric_indefinite);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  long size() const { return size_; }
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  long size_ = 0;
};

inline Factorization factorize(const SparseMatrix& a, bool symmetric_indefinite = false) {
  return Factorization(a, symmetric_indefinite);
}

/// Solver for [K  B^T; B  0] [u; p] = [f; g] where B has the constant
/// vector in its left kernel (pressure defined up to a constant). The first
/// pressure dof is pinned to zero to remove that kernel. Uses a regularized
/// LDL^T with iterative refinement, or pivoted LU when that fails.
class SaddlePointSolver {
 public:
  SaddlePointSolver(const SparseMatrix& k, const SparseMatrix& b);

  long velocity_size() const { return nu_; }
  long pressure_size() const { return np_; }
  /// Returns u; p (pinned gauge, p[0] = 0) is written when non-null.
  Vector solve(const Vector& f, Vector* p = nullptr) const;
  DenseMatrix solve(const DenseMatrix& f) const;
  bool refined() const { return refine_; }

 private:
  DenseMatrix solve_full(const DenseMatrix& rhs) const;

  long nu_ = 0;
  long np_ = 0;
  SparseMatrix exact_;
  std::unique_ptr<Factorization> factor_;
  bool refine_ = false;
};

struct EigenOptions {
  int k = 1;
  double shift = 0.0;
  double tol = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 20240601;
  /// Block size is k + extra_vectors.
  int extra_vectors = 4;
  Execution exec = Execution::Parallel;
};

struct EigenPair {
  double lambda = 0.0;
  Vector vector;
  /// ||A v - lambda B v|| / ||B v||
  double residual = 0.0;
  /// Bound the residual was required to meet: max(tol, attainable floor),
  /// the floor being 4 eps || |A||v| + |lambda| |B||v| || / ||B v||, the
  /// rounding level of the residual evaluation itself.
  double residual_bound = 0.0;
};

struct EigenRun {
  std::vector<EigenPair> pairs;
  int iterations = 0;
};

/// k smallest eigenpairs of A v = lambda B v (A symmetric semidefinite,
/// B symmetric positive definite) by shift-invert subspace iteration with
/// Rayleigh-Ritz. Vectors are B-orthonormal, eigenvalues ascending.
/// Throws ConvergenceError, std::invalid_argument (indefinite B).
EigenRun eigs_smallest(const SparseMatrix& a, const SparseMatrix& b, const EigenOptions& options);

struct StokesEigenPair {
  double lambda = 0.0;
  Vector velocity;  // M-orthonormal
  Vector pressure;  // mean zero
  /// ||A u + B^T p - lambda M u|| / ||M u||
  double residual = 0.0;
  /// max(tol, rounding floor), as for EigenPair.
  double residual_bound = 0.0;
  /// ||B u||
  double divergence = 0.0;
};

struct StokesEigenRun {
  std::vector<StokesEigenPair> pairs;
  int iterations = 0;
};

/// Smallest eigenpairs of A u + B^T p = lambda M u, B u = 0. The shift-invert
/// step factorizes [[A - shift M, B^T], [B, 0]] with one pressure dof pinned.
/// pressure_mass, when given, defines the mean used to centre the pressure.
StokesEigenRun eigs_stokes(const SparseMatrix& a, const SparseMatrix& b_div, const SparseMatrix& m,
                           const EigenOptions& options, const SparseMatrix* pressure_mass = nullptr);

/// Rounding level of ||A v - lambda B v|| / ||B v|| in double precision.
double residual_floor(const SparseMatrix& abs_a, const SparseMatrix& abs_b, const Vector& v, double lambda,
                      const Vector& bv);

/// Deterministic block of uniform values in [-0.5, 0.5) from a 64-bit seed.
DenseMatrix seeded_block(long rows, long cols, std::uint64_t seed);

}  // namespace cflow
