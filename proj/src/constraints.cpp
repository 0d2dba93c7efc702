#include "cflow/constraints.hpp"

#include <stdexcept>

namespace cflow {

DofEmbedding::DofEmbedding(int full_size, const std::vector<int>& constrained) : to_reduced_(full_size, 0) {
  for (int d : constrained) {
    if (d < 0 || d >= full_size) throw std::invalid_argument("DofEmbedding: constrained dof out of range");
    to_reduced_[d] = -1;
  }
  for (int i = 0; i < full_size; ++i) {
    if (to_reduced_[i] < 0) continue;
    to_reduced_[i] = static_cast<int>(free_.size());
    free_.push_back(i);
  }
}

SparseMatrix DofEmbedding::restrict(const SparseMatrix& a) const {
  if (a.rows() != full_size() || a.cols() != full_size()) throw std::invalid_argument("restrict: size mismatch");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r) {
    const int rr = to_reduced_[r];
    if (rr < 0) continue;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const int cc = to_reduced_[it.col()];
      if (cc >= 0) triplets.emplace_back(rr, cc, it.value());
    }
  }
  SparseMatrix out(free_size(), free_size());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseMatrix DofEmbedding::restrict_columns(const SparseMatrix& a) const {
  if (a.cols() != full_size()) throw std::invalid_argument("restrict_columns: size mismatch");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const int cc = to_reduced_[it.col()];
      if (cc >= 0) triplets.emplace_back(r, cc, it.value());
    }
  SparseMatrix out(a.rows(), free_size());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Vector DofEmbedding::embed(const Vector& reduced) const {
  if (reduced.size() != free_size()) throw std::invalid_argument("embed: size mismatch");
  Vector full = Vector::Zero(full_size());
  for (int i = 0; i < free_size(); ++i) full[free_[i]] = reduced[i];
  return full;
}

DenseMatrix DofEmbedding::embed(const DenseMatrix& reduced) const {
  if (reduced.rows() != free_size()) throw std::invalid_argument("embed: size mismatch");
  DenseMatrix full = DenseMatrix::Zero(full_size(), reduced.cols());
  for (int i = 0; i < free_size(); ++i) full.row(free_[i]) = reduced.row(i);
  return full;
}

Vector DofEmbedding::reduce(const Vector& full) const {
  if (full.size() != full_size()) throw std::invalid_argument("reduce: size mismatch");
  Vector out(free_size());
  for (int i = 0; i < free_size(); ++i) out[i] = full[free_[i]];
  return out;
}

DofEmbedding constraint_embedding(const FESpace& space, int limit) {
  std::vector<int> constrained;
  constrained.reserve(space.constraints().size());
  for (const auto& c : space.constraints())
    if (c.dof < limit) constrained.push_back(c.dof);
  return DofEmbedding(limit, constrained);
}

ReducedSystem apply_constraints(const std::vector<SparseMatrix>& matrices, const FESpace& space) {
  const int size = space.has_pressure() ? space.velocity_dofs() : space.dof_count();
  DofEmbedding embedding = constraint_embedding(space, size);
  if (embedding.free_size() == 0) throw std::invalid_argument("apply_constraints: no free dofs remain");
  ReducedSystem out{{}, embedding};
  out.matrices.reserve(matrices.size());
  for (const auto& m : matrices) out.matrices.push_back(embedding.restrict(m));
  return out;
}

}  // namespace cflow
