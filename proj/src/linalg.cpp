#include "cflow/linalg.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>
#include <variant>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace cflow {
namespace {
constexpr double kFloorFactor = 4.0;
}

using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct Factorization::Impl {
  std::variant<std::monostate, Eigen::SimplicialLDLT<ColMajor, Eigen::Lower, Eigen::AMDOrdering<int>>,
               Eigen::SparseLU<ColMajor, Eigen::COLAMDOrdering<int>>>
      solver;
};

namespace {

long trailing_index(const std::string& message) {
  const auto pos = message.find_last_not_of("0123456789");
  if (pos == std::string::npos || pos + 1 >= message.size()) return -1;
  return std::stol(message.substr(pos + 1));
}

}  // namespace

Factorization::Factorization(const SparseMatrix& a, bool symmetric_indefinite)
    : impl_(std::make_unique<Impl>()), size_(a.rows()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("factorize: matrix must be square");
  const ColMajor col = a;
  if (!symmetric_indefinite) {
    auto& ldlt = impl_->solver.emplace<1>();
    ldlt.compute(col);
    long pivot = -1;
    if (ldlt.info() == Eigen::Success) {
      const auto& d = ldlt.vectorD();
      const double scale = d.cwiseAbs().maxCoeff();
      for (long i = 0; i < d.size(); ++i) {
        if (!(std::abs(d[i]) > 1e-14 * scale)) {
          pivot = ldlt.permutationPinv().indices()[i];
          break;
        }
      }
      if (pivot < 0) return;
    }
    std::ostringstream os;
    os << "factorize: numerically singular matrix (zero pivot at row " << pivot << ")";
    throw FactorizationError(os.str(), pivot);
  }
  auto& lu = impl_->solver.emplace<2>();
  lu.analyzePattern(col);
  lu.factorize(col);
  if (lu.info() != Eigen::Success) {
    const std::string msg = lu.lastErrorMessage();
    const long pivot = trailing_index(msg);
    throw FactorizationError("factorize: singular matrix (" + msg + ")", pivot);
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Vector Factorization::solve(const Vector& b) const {
  if (b.size() != size_) throw std::invalid_argument("solve: rhs size mismatch");
  return std::visit(
      [&](auto& s) -> Vector {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::monostate>) {
          throw std::logic_error("solve: empty factorization");
        } else {
          return s.solve(b);
        }
      },
      impl_->solver);
}

DenseMatrix Factorization::solve(const DenseMatrix& b) const {
  if (b.rows() != size_) throw std::invalid_argument("solve: rhs size mismatch");
  return std::visit(
      [&](auto& s) -> DenseMatrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::monostate>) {
          throw std::logic_error("solve: empty factorization");
        } else {
          return s.solve(b);
        }
      },
      impl_->solver);
}

namespace {

SparseMatrix saddle_matrix(const SparseMatrix& k, const SparseMatrix& b, double regularization) {
  if (k.rows() != k.cols() || b.cols() != k.cols()) throw std::invalid_argument("saddle point: block size mismatch");
  const long nu = k.rows();
  const long np = b.rows();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(k.nonZeros() + 2 * b.nonZeros() + np));
  for (int r = 0; r < k.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(k, r); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
  // Pressure row 0 is pinned: drop it from B and B^T.
  for (int r = 1; r < b.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(b, r); it; ++it) {
      triplets.emplace_back(nu + it.row() - 1, it.col(), it.value());
      triplets.emplace_back(it.col(), nu + it.row() - 1, it.value());
    }
  if (regularization != 0.0)
    for (long r = 0; r + 1 < np; ++r) triplets.emplace_back(nu + r, nu + r, -regularization);
  SparseMatrix out(nu + np - 1, nu + np - 1);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

// Relative size of the -eps I pressure block. Small enough that a couple of
// refinement sweeps recover the unregularized solution to rounding level.
constexpr double kRegularization = 1e-12;
constexpr int kMaxRefinement = 8;

}  // namespace

SaddlePointSolver::SaddlePointSolver(const SparseMatrix& k, const SparseMatrix& b)
    : nu_(k.rows()), np_(b.rows()), exact_(saddle_matrix(k, b, 0.0)) {
  // Quasi-definite route first: LDL^T of the regularized matrix, corrected by
  // iterative refinement against the exact one. Falls back to pivoted LU.
  double scale = 0.0;
  for (long i = 0; i < nu_; ++i) scale = std::max(scale, std::abs(k.coeff(i, i)));
  try {
    factor_ = std::make_unique<Factorization>(saddle_matrix(k, b, kRegularization * scale), false);
    refine_ = true;
    const DenseMatrix probe = seeded_block(exact_.rows(), 1, 7);
    const DenseMatrix x = solve_full(probe);
    if (!((exact_ * x - probe).norm() <= 1e-12 * probe.norm())) throw FactorizationError("refinement stalled", -1);
  } catch (const FactorizationError&) {
    refine_ = false;
    factor_ = std::make_unique<Factorization>(exact_, true);
  }
}

DenseMatrix SaddlePointSolver::solve_full(const DenseMatrix& rhs) const {
  DenseMatrix x = factor_->solve(rhs);
  if (!refine_) return x;
  const double target = 1e-15 * rhs.norm();
  double previous = INFINITY;
  for (int sweep = 0; sweep < kMaxRefinement; ++sweep) {
    const DenseMatrix r = rhs - exact_ * x;
    const double rn = r.norm();
    if (rn <= target || rn >= 0.5 * previous) break;
    previous = rn;
    x += factor_->solve(r);
  }
  return x;
}

Vector SaddlePointSolver::solve(const Vector& f, Vector* p) const {
  DenseMatrix rhs = DenseMatrix::Zero(nu_ + np_ - 1, 1);
  rhs.col(0).head(nu_) = f;
  const DenseMatrix x = solve_full(rhs);
  if (p) {
    p->setZero(np_);
    p->tail(np_ - 1) = x.col(0).tail(np_ - 1);
  }
  return x.col(0).head(nu_);
}

DenseMatrix SaddlePointSolver::solve(const DenseMatrix& f) const {
  DenseMatrix rhs = DenseMatrix::Zero(nu_ + np_ - 1, f.cols());
  rhs.topRows(nu_) = f;
  return solve_full(rhs).topRows(nu_);
}

DenseMatrix seeded_block(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  DenseMatrix out(rows, cols);
  for (long c = 0; c < cols; ++c)
    for (long r = 0; r < rows; ++r) out(r, c) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  return out;
}

double residual_floor(const SparseMatrix& abs_a, const SparseMatrix& abs_b, const Vector& v, double lambda,
                      const Vector& bv) {
  const Vector av = v.cwiseAbs();
  const Vector magnitude = abs_a * av + std::abs(lambda) * (abs_b * av);
  return kFloorFactor * std::numeric_limits<double>::epsilon() * magnitude.norm() / bv.norm();
}

namespace {

// Makes the columns of y orthonormal in the b inner product (Cholesky QR,
// applied twice). by receives b * y.
void b_orthonormalize(const SparseMatrix& b, DenseMatrix& y, DenseMatrix& by, Execution exec) {
  for (int pass = 0; pass < 2; ++pass) {
    by = spmm(b, y, exec);
    DenseMatrix gram = y.transpose() * by;
    gram = 0.5 * (gram + gram.transpose());
    Eigen::LLT<DenseMatrix> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("eigensolver: B is not positive definite on the iteration subspace");
    const DenseMatrix l_inv_t = llt.matrixL().solve(DenseMatrix::Identity(gram.rows(), gram.cols())).transpose();
    y = y * l_inv_t;
  }
  by = spmm(b, y, exec);
}

struct RitzStep {
  Eigen::VectorXd values;
  DenseMatrix vectors;  // n x m, B-orthonormal
};

RitzStep rayleigh_ritz(const SparseMatrix& a, const DenseMatrix& y, Execution exec) {
  DenseMatrix ar = y.transpose() * spmm(a, y, exec);
  ar = 0.5 * (ar + ar.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(ar);
  return {eig.eigenvalues(), y * eig.eigenvectors()};
}

int block_size(const EigenOptions& o, long n) {
  if (o.k < 1) throw std::invalid_argument("eigensolver: k must be >= 1");
  if (o.k > n) throw std::invalid_argument("eigensolver: k exceeds the problem size");
  return static_cast<int>(std::min<long>(o.k + std::max(0, o.extra_vectors), n));
}

}  // namespace

EigenRun eigs_smallest(const SparseMatrix& a, const SparseMatrix& b, const EigenOptions& o) {
  const long n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw std::invalid_argument("eigs_smallest: size mismatch");
  for (long i = 0; i < n; ++i)
    if (!(b.coeff(i, i) > 0.0)) throw std::invalid_argument("eigs_smallest: B is not positive definite");
  const int m = block_size(o, n);

  const SparseMatrix shifted = o.shift == 0.0 ? a : SparseMatrix(a - o.shift * b);
  const Factorization op(shifted, false);
  const SparseMatrix abs_a = a.cwiseAbs();
  const SparseMatrix abs_b = b.cwiseAbs();

  DenseMatrix x = seeded_block(n, m, o.seed);
  DenseMatrix bx;
  b_orthonormalize(b, x, bx, o.exec);

  EigenRun run;
  double worst = INFINITY;
  for (int it = 1; it <= o.max_iterations; ++it) {
    DenseMatrix y = op.solve(bx);
    DenseMatrix by;
    b_orthonormalize(b, y, by, o.exec);
    RitzStep ritz = rayleigh_ritz(a, y, o.exec);
    x = std::move(ritz.vectors);
    bx = spmm(b, x, o.exec);
    const DenseMatrix ax = spmm(a, x, o.exec);

    worst = 0.0;
    bool converged = true;
    std::vector<EigenPair> pairs(o.k);
    for (int i = 0; i < o.k; ++i) {
      const double lambda = ritz.values[i];
      const Vector bxi = bx.col(i);
      const double res = (ax.col(i) - lambda * bxi).norm() / bxi.norm();
      const double bound = std::max(o.tol, residual_floor(abs_a, abs_b, x.col(i), lambda, bxi));
      pairs[i] = {lambda, x.col(i), res, bound};
      worst = std::max(worst, res);
      converged = converged && res <= bound;
    }
    if (converged) {
      run.pairs = std::move(pairs);
      run.iterations = it;
      return run;
    }
  }
  std::ostringstream os;
  os << "eigs_smallest: no convergence after " << o.max_iterations << " iterations (residual " << worst << ")";
  throw ConvergenceError(os.str(), worst);
}

StokesEigenRun eigs_stokes(const SparseMatrix& a, const SparseMatrix& b_div, const SparseMatrix& m,
                           const EigenOptions& o, const SparseMatrix* pressure_mass) {
  const long n = a.rows();
  const long np = b_div.rows();
  if (a.cols() != n || m.rows() != n || b_div.cols() != n) throw std::invalid_argument("eigs_stokes: size mismatch");
  if (np < 2) throw std::invalid_argument("eigs_stokes: need at least two pressure dofs");
  const int block = block_size(o, n - np + 1);

  const SparseMatrix shifted = o.shift == 0.0 ? a : SparseMatrix(a - o.shift * m);
  const SaddlePointSolver op(shifted, b_div);

  // Least-squares pressure recovery on the pinned gauge.
  const SparseMatrix b_pinned = b_div.bottomRows(np - 1);
  const SparseMatrix bbt = b_pinned * b_pinned.transpose();
  std::unique_ptr<Factorization> normal;
  try {
    normal = std::make_unique<Factorization>(bbt, false);
  } catch (const FactorizationError& e) {
    throw std::invalid_argument(std::string("eigs_stokes: divergence block is rank deficient beyond constants: ") +
                                e.what());
  }

  const SparseMatrix abs_a = a.cwiseAbs();
  const SparseMatrix abs_m = m.cwiseAbs();

  DenseMatrix x = seeded_block(n, block, o.seed);
  DenseMatrix mx = spmm(m, x, o.exec);

  StokesEigenRun run;
  double worst = INFINITY;
  for (int it = 1; it <= o.max_iterations; ++it) {
    DenseMatrix y = op.solve(mx);
    DenseMatrix my;
    b_orthonormalize(m, y, my, o.exec);
    RitzStep ritz = rayleigh_ritz(a, y, o.exec);
    x = std::move(ritz.vectors);
    mx = spmm(m, x, o.exec);
    const DenseMatrix ax = spmm(a, x, o.exec);

    worst = 0.0;
    bool converged = true;
    std::vector<StokesEigenPair> pairs(o.k);
    for (int i = 0; i < o.k; ++i) {
      const double lambda = ritz.values[i];
      const Vector r0 = ax.col(i) - lambda * mx.col(i);
      const Vector p_pinned = normal->solve(Vector(-(b_pinned * r0)));
      const Vector r = r0 + b_pinned.transpose() * p_pinned;
      StokesEigenPair& pair = pairs[i];
      pair.lambda = lambda;
      pair.velocity = x.col(i);
      pair.pressure = Vector::Zero(np);
      pair.pressure.tail(np - 1) = p_pinned;
      pair.residual = r.norm() / mx.col(i).norm();
      pair.divergence = (b_div * pair.velocity).norm();
      pair.residual_bound =
          std::max(o.tol, residual_floor(abs_a, abs_m, pair.velocity, lambda, Vector(mx.col(i))));
      worst = std::max(worst, pair.residual);
      converged = converged && pair.residual <= pair.residual_bound && pair.divergence <= o.tol;
    }
    if (converged) {
      for (auto& pair : pairs) {
        if (pressure_mass) {
          const Vector ones = Vector::Ones(np);
          const Vector mp = *pressure_mass * ones;
          pair.pressure.array() -= mp.dot(pair.pressure) / mp.sum();
        } else {
          pair.pressure.array() -= pair.pressure.mean();
        }
      }
      run.pairs = std::move(pairs);
      run.iterations = it;
      return run;
    }
  }
  std::ostringstream os;
  os << "eigs_stokes: no convergence after " << o.max_iterations << " iterations (residual " << worst << ")";
  throw ConvergenceError(os.str(), worst);
}

}  // namespace cflow
