#pragma once

#include <functional>

#include "cflow/fe_space.hpp"
#include "cflow/sparse.hpp"

namespace cflow {

/// Matrices of the Taylor-Hood discretisation:
///   a  velocity Dirichlet form  int grad u : grad v
///   b  divergence               -int q div v   (pressure rows, velocity columns)
///   m  velocity mass            int u . v
struct StokesSystem {
  SparseMatrix a;
  SparseMatrix b;
  SparseMatrix m;
};

/// int grad a . grad b on a scalar space (Morley uses the broken gradient).
/// Throws std::invalid_argument for vector spaces and P0.
SparseMatrix assemble_stiffness(const FESpace& space, Execution exec = Execution::Parallel);

/// int a b, component-wise for vector spaces (velocity block only for
/// Taylor-Hood).
SparseMatrix assemble_mass(const FESpace& space, Execution exec = Execution::Parallel);

/// Broken Hessian product sum_T int_T D^2 a : D^2 b on a Morley space.
SparseMatrix assemble_morley_hessian(const FESpace& space, Execution exec = Execution::Parallel);

/// Broken form sum_T int_T (2 a_xy b_xy - a_xx b_yy - a_yy b_xx) / 2 on a
/// Morley space; its quadratic form is the twist functional
/// int (psi_xy^2 - psi_xx psi_yy), the gap between |D^2 psi|^2 and (Lap psi)^2.
SparseMatrix assemble_morley_twist(const FESpace& space, Execution exec = Execution::Parallel);

StokesSystem assemble_stokes_system(const FESpace& space, Execution exec = Execution::Parallel);

/// int f phi_i for a scalar space.
Vector assemble_load(const FESpace& space, const std::function<double(Point)>& f);

namespace detail {

/// Element loop shared by every assembler. Local blocks are computed
/// independently (in parallel when asked) and scattered in element order,
/// so the result is identical for any thread count.
struct LocalBlock {
  int rows = 0;
  int cols = 0;
  int row_dofs[12] = {};
  int col_dofs[12] = {};
  double values[12 * 12] = {};
  double& at(int i, int j) { return values[i * cols + j]; }
};

SparseMatrix assemble_elements(long rows, long cols, int elements, const std::function<void(int, LocalBlock&)>& kernel,
                               Execution exec);

}  // namespace detail
}  // namespace cflow
