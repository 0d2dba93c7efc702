#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cflow {

/// Compressed sparse row storage, double precision.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Serial kernels are the reference; Parallel runs the same arithmetic per
/// row/element under OpenMP and is required to reproduce Serial bit for bit
/// wherever the work splits without reassociation (assembly, row-wise SpMV).
enum class Execution { Serial, Parallel };

/// y = A x, one output row at a time.
void spmv(const SparseMatrix& a, const Vector& x, Vector& y, Execution exec = Execution::Parallel);
Vector spmv(const SparseMatrix& a, const Vector& x, Execution exec = Execution::Parallel);
/// Y = A X for a dense block of columns.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x, Execution exec = Execution::Parallel);

/// max |a_ij - a_ji| / max |a_ij|.
double symmetry_defect(const SparseMatrix& a);

/// Writes "%%MatrixMarket matrix coordinate real general".
void write_matrix_market(const SparseMatrix& a, const std::string& path);

}  // namespace cflow
