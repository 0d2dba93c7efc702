#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cflow/mesh.hpp"

namespace cflow {

/// Scalar element families. Every local basis function is represented as a
/// polynomial of degree <= 2 on its triangle.
enum class ElementType { P0, P1, P2, Morley, P1Disc };

enum class SpaceKind {
  P0,            // piecewise constants
  P1,            // continuous linears
  P2,            // continuous quadratics
  Morley,        // vertex values + edge-midpoint normal derivatives
  P1DiscVector,  // broken linear 2-vectors
  P2Vector,      // continuous quadratic 2-vectors
  TaylorHood,    // P2 velocity x P1 pressure
};

std::string to_string(SpaceKind kind);

enum class ConstraintKind { Value, NormalDerivative };

struct Constraint {
  int dof = 0;
  ConstraintKind kind = ConstraintKind::Value;
};

/// Symmetric 2x2 Hessian.
struct Hessian {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
  double trace() const { return xx + yy; }
};

/// A polynomial of degree <= 2 on one triangle, written in scaled local
/// coordinates (x - cx)/s, (y - cy)/s.
struct LocalPoly {
  std::array<double, 6> c{};  // 1, X, Y, X^2, XY, Y^2

  double value(Point p, Point centre, double scale) const;
  Point gradient(Point p, Point centre, double scale) const;
  Hessian hessian(double scale) const;
};

/// Geometry of one triangle plus the local basis of one element family.
class ElementBasis {
 public:
  ElementBasis(const Mesh& mesh, int triangle, ElementType type);

  int size() const { return size_; }
  double area() const { return area_; }
  Point vertex(int i) const { return v_[i]; }
  Point map(const std::array<double, 3>& bary) const;

  double value(int i, Point p) const { return poly_[i].value(p, centre_, scale_); }
  Point gradient(int i, Point p) const { return poly_[i].gradient(p, centre_, scale_); }
  Hessian hessian(int i) const { return poly_[i].hessian(scale_); }

  /// Barycentric coordinates of p with respect to this triangle.
  std::array<double, 3> barycentric(Point p) const;

 private:
  std::array<Point, 3> v_{};
  Point centre_{};
  double scale_ = 1.0;
  double area_ = 0.0;
  int size_ = 0;
  std::array<LocalPoly, 6> poly_{};
};

/// Finite-element space on a mesh. Vector spaces store component 0 first,
/// then component 1; Taylor-Hood appends the P1 pressure after the velocity.
class FESpace {
 public:
  FESpace(MeshPtr mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }

  int dof_count() const { return dof_count_; }
  /// Element family of each velocity/scalar component.
  ElementType element() const { return element_; }
  int components() const { return components_; }
  /// Dofs per component.
  int component_dofs() const { return component_dofs_; }
  int local_size() const { return local_size_; }
  bool is_scalar() const { return components_ == 1 && !has_pressure(); }

  /// Component-local dof indices on triangle t, in the order of
  /// ElementBasis (vertices, then edges opposite vertex 0,1,2).
  std::span<const int> local_dofs(int t) const {
    return {dof_map_.data() + static_cast<std::size_t>(t) * local_size_, static_cast<std::size_t>(local_size_)};
  }
  int component_offset(int c) const { return c * component_dofs_; }

  bool has_pressure() const { return kind_ == SpaceKind::TaylorHood; }
  int pressure_offset() const { return components_ * component_dofs_; }
  int pressure_dofs() const { return has_pressure() ? mesh_->vertex_count() : 0; }
  int velocity_dofs() const { return components_ * component_dofs_; }

  /// Homogeneous essential constraints of the natural problem on this space:
  /// Dirichlet values for P1/P2/vector spaces, clamped (values and normal
  /// derivatives) for Morley, no-slip velocity for Taylor-Hood. Empty for
  /// the discontinuous kinds.
  const std::vector<Constraint>& constraints() const { return constraints_; }

  ElementBasis basis(int t) const { return ElementBasis(*mesh_, t, element_); }

 private:
  MeshPtr mesh_;
  SpaceKind kind_;
  ElementType element_ = ElementType::P1;
  int components_ = 1;
  int component_dofs_ = 0;
  int local_size_ = 0;
  int dof_count_ = 0;
  std::vector<int> dof_map_;
  std::vector<Constraint> constraints_;
};

using SpacePtr = std::shared_ptr<const FESpace>;

inline SpacePtr make_space(MeshPtr mesh, SpaceKind kind) {
  return std::make_shared<const FESpace>(std::move(mesh), kind);
}

/// Unit normal of global edge e = (a,b), a < b: the direction (b - a)
/// rotated clockwise. Morley edge dofs are derivatives along this normal.
Point edge_normal(const Mesh& mesh, int e);

}  // namespace cflow
