#include "cflow/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace cflow {

void spmv(const SparseMatrix& a, const Vector& x, Vector& y, Execution exec) {
  if (x.size() != a.cols()) throw std::invalid_argument("spmv: dimension mismatch");
  y.resize(a.rows());
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* values = a.valuePtr();
  const long rows = a.rows();
  auto row = [&](long i) {
    double sum = 0.0;
    for (auto k = outer[i]; k < outer[i + 1]; ++k) sum += values[k] * x[inner[k]];
    y[i] = sum;
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < rows; ++i) row(i);
  } else {
    for (long i = 0; i < rows; ++i) row(i);
  }
}

Vector spmv(const SparseMatrix& a, const Vector& x, Execution exec) {
  Vector y;
  spmv(a, x, y, exec);
  return y;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x, Execution exec) {
  if (x.rows() != a.cols()) throw std::invalid_argument("spmm: dimension mismatch");
  DenseMatrix y(a.rows(), x.cols());
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* values = a.valuePtr();
  const long rows = a.rows();
  const long cols = x.cols();
  auto row = [&](long i) {
    for (long c = 0; c < cols; ++c) {
      double sum = 0.0;
      for (auto k = outer[i]; k < outer[i + 1]; ++k) sum += values[k] * x(inner[k], c);
      y(i, c) = sum;
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < rows; ++i) row(i);
  } else {
    for (long i = 0; i < rows; ++i) row(i);
  }
  return y;
}

double symmetry_defect(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  const SparseMatrix t = a.transpose();
  const SparseMatrix d = a - t;
  double scale = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  double defect = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
  return scale > 0.0 ? defect / scale : defect;
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace cflow
