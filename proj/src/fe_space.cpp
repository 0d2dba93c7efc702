#include "cflow/fe_space.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace cflow {
namespace {

int local_size_of(ElementType type) {
  switch (type) {
    case ElementType::P0: return 1;
    case ElementType::P1:
    case ElementType::P1Disc: return 3;
    case ElementType::P2:
    case ElementType::Morley: return 6;
  }
  return 0;
}

// Row of monomial values / derivatives, scaled coordinates.
std::array<double, 6> monomials(double X, double Y) { return {1.0, X, Y, X * X, X * Y, Y * Y}; }

std::array<double, 6> monomial_directional(double X, double Y, Point dir, double scale) {
  // d/dn of each monomial in physical coordinates.
  const double dx = dir.x / scale;
  const double dy = dir.y / scale;
  return {0.0, dx, dy, 2.0 * X * dx, Y * dx + X * dy, 2.0 * Y * dy};
}

}  // namespace

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P0: return "P0";
    case SpaceKind::P1: return "P1";
    case SpaceKind::P2: return "P2";
    case SpaceKind::Morley: return "Morley";
    case SpaceKind::P1DiscVector: return "P1disc-vector";
    case SpaceKind::P2Vector: return "P2-vector";
    case SpaceKind::TaylorHood: return "TaylorHood";
  }
  return "?";
}

double LocalPoly::value(Point p, Point centre, double scale) const {
  const double X = (p.x - centre.x) / scale;
  const double Y = (p.y - centre.y) / scale;
  return c[0] + c[1] * X + c[2] * Y + c[3] * X * X + c[4] * X * Y + c[5] * Y * Y;
}

Point LocalPoly::gradient(Point p, Point centre, double scale) const {
  const double X = (p.x - centre.x) / scale;
  const double Y = (p.y - centre.y) / scale;
  return {(c[1] + 2.0 * c[3] * X + c[4] * Y) / scale, (c[2] + c[4] * X + 2.0 * c[5] * Y) / scale};
}

Hessian LocalPoly::hessian(double scale) const {
  const double s2 = scale * scale;
  return {2.0 * c[3] / s2, c[4] / s2, 2.0 * c[5] / s2};
}

Point edge_normal(const Mesh& mesh, int e) {
  const auto& edge = mesh.edges()[e];
  const Point t = mesh.vertices()[edge[1]] - mesh.vertices()[edge[0]];
  const double len = norm(t);
  return {t.y / len, -t.x / len};
}

ElementBasis::ElementBasis(const Mesh& mesh, int triangle, ElementType type) : size_(local_size_of(type)) {
  const auto& tri = mesh.triangles()[triangle];
  for (int i = 0; i < 3; ++i) v_[i] = mesh.vertices()[tri[i]];
  centre_ = (1.0 / 3.0) * (v_[0] + v_[1] + v_[2]);
  area_ = 0.5 * cross(v_[1] - v_[0], v_[2] - v_[0]);
  scale_ = std::sqrt(area_);

  const int n = size_;
  Eigen::MatrixXd functionals(n, n);
  auto scaled = [&](Point p) { return std::pair{(p.x - centre_.x) / scale_, (p.y - centre_.y) / scale_}; };
  auto value_row = [&](int row, Point p) {
    const auto [X, Y] = scaled(p);
    const auto m = monomials(X, Y);
    for (int j = 0; j < n; ++j) functionals(row, j) = m[j];
  };

  if (type == ElementType::P0) {
    functionals(0, 0) = 1.0;
  } else {
    for (int i = 0; i < 3; ++i) value_row(i, v_[i]);
  }
  if (n == 6) {
    const auto& edges = mesh.triangle_edges(triangle);
    for (int i = 0; i < 3; ++i) {
      const Point mid = 0.5 * (v_[(i + 1) % 3] + v_[(i + 2) % 3]);
      if (type == ElementType::P2) {
        value_row(3 + i, mid);
      } else {
        const auto [X, Y] = scaled(mid);
        const auto d = monomial_directional(X, Y, edge_normal(mesh, edges[i]), scale_);
        for (int j = 0; j < n; ++j) functionals(3 + i, j) = d[j];
      }
    }
  }

  const Eigen::MatrixXd coeffs = functionals.fullPivLu().inverse();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) poly_[k].c[j] = coeffs(j, k);
}

Point ElementBasis::map(const std::array<double, 3>& b) const {
  return {b[0] * v_[0].x + b[1] * v_[1].x + b[2] * v_[2].x, b[0] * v_[0].y + b[1] * v_[1].y + b[2] * v_[2].y};
}

std::array<double, 3> ElementBasis::barycentric(Point p) const {
  const double twice = 2.0 * area_;
  const double l0 = cross(v_[1] - p, v_[2] - p) / twice;
  const double l1 = cross(v_[2] - p, v_[0] - p) / twice;
  return {l0, l1, 1.0 - l0 - l1};
}

FESpace::FESpace(MeshPtr mesh, SpaceKind kind) : mesh_(std::move(mesh)), kind_(kind) {
  if (!mesh_) throw std::invalid_argument("FESpace: null mesh");
  const int nv = mesh_->vertex_count();
  const int ne = mesh_->edge_count();
  const int nt = mesh_->triangle_count();

  switch (kind_) {
    case SpaceKind::P0: element_ = ElementType::P0; break;
    case SpaceKind::P1: element_ = ElementType::P1; break;
    case SpaceKind::P2:
    case SpaceKind::P2Vector:
    case SpaceKind::TaylorHood: element_ = ElementType::P2; break;
    case SpaceKind::Morley: element_ = ElementType::Morley; break;
    case SpaceKind::P1DiscVector: element_ = ElementType::P1Disc; break;
  }
  components_ = (kind_ == SpaceKind::P1DiscVector || kind_ == SpaceKind::P2Vector || kind_ == SpaceKind::TaylorHood)
                    ? 2
                    : 1;
  local_size_ = local_size_of(element_);

  switch (element_) {
    case ElementType::P0: component_dofs_ = nt; break;
    case ElementType::P1: component_dofs_ = nv; break;
    case ElementType::P1Disc: component_dofs_ = 3 * nt; break;
    case ElementType::P2:
    case ElementType::Morley: component_dofs_ = nv + ne; break;
  }
  dof_count_ = components_ * component_dofs_ + (kind_ == SpaceKind::TaylorHood ? nv : 0);

  dof_map_.resize(static_cast<std::size_t>(nt) * local_size_);
  for (int t = 0; t < nt; ++t) {
    int* out = dof_map_.data() + static_cast<std::size_t>(t) * local_size_;
    const auto& tri = mesh_->triangles()[t];
    const auto& edges = mesh_->triangle_edges(t);
    switch (element_) {
      case ElementType::P0: out[0] = t; break;
      case ElementType::P1:
        for (int i = 0; i < 3; ++i) out[i] = tri[i];
        break;
      case ElementType::P1Disc:
        for (int i = 0; i < 3; ++i) out[i] = 3 * t + i;
        break;
      case ElementType::P2:
      case ElementType::Morley:
        for (int i = 0; i < 3; ++i) {
          out[i] = tri[i];
          out[3 + i] = nv + edges[i];
        }
        break;
    }
  }

  if (element_ == ElementType::P0 || element_ == ElementType::P1Disc) return;
  for (int c = 0; c < components_; ++c) {
    const int offset = component_offset(c);
    for (int v : mesh_->boundary()) constraints_.push_back({offset + v, ConstraintKind::Value});
    if (element_ == ElementType::P2)
      for (int e : mesh_->boundary_edges()) constraints_.push_back({offset + nv + e, ConstraintKind::Value});
    if (element_ == ElementType::Morley)
      for (int e : mesh_->boundary_edges()) constraints_.push_back({offset + nv + e, ConstraintKind::NormalDerivative});
  }
}

}  // namespace cflow
