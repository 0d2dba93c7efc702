#include "cflow/assembly.hpp"

#include <stdexcept>
#include <vector>

#include "cflow/quadrature.hpp"

namespace cflow {
namespace detail {

SparseMatrix assemble_elements(long rows, long cols, int elements, const std::function<void(int, LocalBlock&)>& kernel,
                               Execution exec) {
  std::vector<LocalBlock> blocks(static_cast<std::size_t>(elements));
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < elements; ++t) kernel(t, blocks[t]);
  } else {
    for (int t = 0; t < elements; ++t) kernel(t, blocks[t]);
  }

  std::size_t nnz = 0;
  for (const auto& b : blocks) nnz += static_cast<std::size_t>(b.rows) * b.cols;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(nnz);
  for (const auto& b : blocks)
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < b.cols; ++j) triplets.emplace_back(b.row_dofs[i], b.col_dofs[j], b.values[i * b.cols + j]);

  SparseMatrix out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace detail

namespace {

using detail::LocalBlock;

const TriangleRule& rule_for(ElementType type) {
  return type == ElementType::P1 || type == ElementType::P0 || type == ElementType::P1Disc ? triangle_rule_degree2()
                                                                                            : triangle_rule_degree4();
}

void require_scalar(const FESpace& space, const char* what) {
  if (!space.is_scalar()) throw std::invalid_argument(std::string(what) + ": scalar space required");
}

}  // namespace

SparseMatrix assemble_stiffness(const FESpace& space, Execution exec) {
  require_scalar(space, "assemble_stiffness");
  if (space.element() == ElementType::P0) throw std::invalid_argument("assemble_stiffness: P0 has no gradient");
  const auto& rule = rule_for(space.element());
  auto kernel = [&](int t, LocalBlock& block) {
    block = LocalBlock{};
    const ElementBasis basis = space.basis(t);
    const auto dofs = space.local_dofs(t);
    const int n = basis.size();
    block.rows = block.cols = n;
    for (int i = 0; i < n; ++i) block.row_dofs[i] = block.col_dofs[i] = dofs[i];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = basis.map(rule.points[q]);
      const double w = rule.weights[q] * basis.area();
      Point g[6];
      for (int i = 0; i < n; ++i) g[i] = basis.gradient(i, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) block.at(i, j) += w * dot(g[i], g[j]);
    }
  };
  return detail::assemble_elements(space.dof_count(), space.dof_count(), space.mesh().triangle_count(), kernel, exec);
}

SparseMatrix assemble_mass(const FESpace& space, Execution exec) {
  const auto& rule = rule_for(space.element());
  const int comps = space.components();
  const int n = space.local_size();
  const long dim = space.has_pressure() ? space.velocity_dofs() : space.dof_count();
  auto kernel = [&](int t, LocalBlock& block) {
    block = LocalBlock{};
    const ElementBasis basis = space.basis(t);
    const auto dofs = space.local_dofs(t);
    double local[36] = {};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = basis.map(rule.points[q]);
      const double w = rule.weights[q] * basis.area();
      double v[6];
      for (int i = 0; i < n; ++i) v[i] = basis.value(i, x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) local[i * n + j] += w * v[i] * v[j];
    }
    block.rows = block.cols = comps * n;
    for (int c = 0; c < comps; ++c) {
      for (int i = 0; i < n; ++i) {
        block.row_dofs[c * n + i] = space.component_offset(c) + dofs[i];
        block.col_dofs[c * n + i] = space.component_offset(c) + dofs[i];
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) block.at(c * n + i, c * n + j) = local[i * n + j];
    }
  };
  return detail::assemble_elements(dim, dim, space.mesh().triangle_count(), kernel, exec);
}

namespace {

template <class Product>
SparseMatrix morley_hessian_form(const FESpace& space, Execution exec, Product product, const char* what) {
  if (space.kind() != SpaceKind::Morley) throw std::invalid_argument(std::string(what) + ": Morley space required");
  auto kernel = [&](int t, LocalBlock& block) {
    block = LocalBlock{};
    const ElementBasis basis = space.basis(t);
    const auto dofs = space.local_dofs(t);
    block.rows = block.cols = 6;
    Hessian hs[6];
    for (int i = 0; i < 6; ++i) {
      hs[i] = basis.hessian(i);
      block.row_dofs[i] = block.col_dofs[i] = dofs[i];
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) block.at(i, j) = basis.area() * product(hs[i], hs[j]);
  };
  return detail::assemble_elements(space.dof_count(), space.dof_count(), space.mesh().triangle_count(), kernel, exec);
}

}  // namespace

SparseMatrix assemble_morley_hessian(const FESpace& space, Execution exec) {
  return morley_hessian_form(
      space, exec, [](const Hessian& a, const Hessian& b) { return a.xx * b.xx + 2.0 * a.xy * b.xy + a.yy * b.yy; },
      "assemble_morley_hessian");
}

SparseMatrix assemble_morley_twist(const FESpace& space, Execution exec) {
  return morley_hessian_form(
      space, exec,
      [](const Hessian& a, const Hessian& b) { return a.xy * b.xy - 0.5 * (a.xx * b.yy + a.yy * b.xx); },
      "assemble_morley_twist");
}

StokesSystem assemble_stokes_system(const FESpace& space, Execution exec) {
  if (space.kind() != SpaceKind::TaylorHood)
    throw std::invalid_argument("assemble_stokes_system: Taylor-Hood space required");
  const auto& mesh = space.mesh();
  const FESpace scalar(space.mesh_ptr(), SpaceKind::P2);
  const SparseMatrix k = assemble_stiffness(scalar, exec);
  const long nu = space.velocity_dofs();
  const int n2 = space.component_dofs();

  StokesSystem sys;
  sys.m = assemble_mass(space, exec);
  {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * static_cast<std::size_t>(k.nonZeros()));
    for (int c = 0; c < 2; ++c)
      for (int r = 0; r < k.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(k, r); it; ++it)
          triplets.emplace_back(c * n2 + it.row(), c * n2 + it.col(), it.value());
    sys.a.resize(nu, nu);
    sys.a.setFromTriplets(triplets.begin(), triplets.end());
  }

  const auto& rule = triangle_rule_degree4();
  auto kernel = [&](int t, LocalBlock& block) {
    block = LocalBlock{};
    const ElementBasis velocity = space.basis(t);
    const ElementBasis pressure(mesh, t, ElementType::P1);
    const auto dofs = space.local_dofs(t);
    const auto& tri = mesh.triangles()[t];
    block.rows = 3;
    block.cols = 12;
    for (int i = 0; i < 3; ++i) block.row_dofs[i] = tri[i];
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 6; ++j) block.col_dofs[c * 6 + j] = space.component_offset(c) + dofs[j];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = velocity.map(rule.points[q]);
      const double w = rule.weights[q] * velocity.area();
      for (int i = 0; i < 3; ++i) {
        const double qv = pressure.value(i, x);
        for (int j = 0; j < 6; ++j) {
          const Point g = velocity.gradient(j, x);
          block.at(i, j) -= w * qv * g.x;
          block.at(i, 6 + j) -= w * qv * g.y;
        }
      }
    }
  };
  sys.b = detail::assemble_elements(space.pressure_dofs(), nu, mesh.triangle_count(), kernel, exec);
  return sys;
}

Vector assemble_load(const FESpace& space, const std::function<double(Point)>& f) {
  require_scalar(space, "assemble_load");
  const auto& rule = triangle_rule_degree4();
  Vector load = Vector::Zero(space.dof_count());
  for (int t = 0; t < space.mesh().triangle_count(); ++t) {
    const ElementBasis basis = space.basis(t);
    const auto dofs = space.local_dofs(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = basis.map(rule.points[q]);
      const double w = rule.weights[q] * basis.area() * f(x);
      for (int i = 0; i < basis.size(); ++i) load[dofs[i]] += w * basis.value(i, x);
    }
  }
  return load;
}

}  // namespace cflow
