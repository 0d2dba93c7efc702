#pragma once

#include <vector>

#include "cflow/fe_space.hpp"
#include "cflow/sparse.hpp"

namespace cflow {

/// Map between a full dof vector and the free (unconstrained) dofs.
/// Constrained dofs are homogeneous: embed() writes zeros there.
class DofEmbedding {
 public:
  DofEmbedding(int full_size, const std::vector<int>& constrained);

  int full_size() const { return static_cast<int>(to_reduced_.size()); }
  int free_size() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free_dofs() const { return free_; }
  /// -1 for constrained dofs.
  int reduced_index(int full) const { return to_reduced_[full]; }

  SparseMatrix restrict(const SparseMatrix& a) const;
  /// Keeps every row, drops constrained columns.
  SparseMatrix restrict_columns(const SparseMatrix& a) const;
  Vector embed(const Vector& reduced) const;
  DenseMatrix embed(const DenseMatrix& reduced) const;
  Vector reduce(const Vector& full) const;

 private:
  std::vector<int> free_;
  std::vector<int> to_reduced_;
};

struct ReducedSystem {
  std::vector<SparseMatrix> matrices;
  DofEmbedding embedding;
};

/// Restricts each square matrix to the free dofs of space.constraints().
/// For Taylor-Hood only the velocity block is constrained; pass velocity
/// matrices. Throws std::invalid_argument when no free dof remains.
ReducedSystem apply_constraints(const std::vector<SparseMatrix>& matrices, const FESpace& space);

/// Embedding for space.constraints() restricted to indices < limit.
DofEmbedding constraint_embedding(const FESpace& space, int limit);

}  // namespace cflow
