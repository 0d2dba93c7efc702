#include "cflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cflow/quadrature.hpp"

namespace cflow {

FieldFunction::FieldFunction(SpacePtr s, Vector c) : space(std::move(s)), coefficients(std::move(c)) {
  if (!space) throw std::invalid_argument("FieldFunction: null space");
  if (coefficients.size() != space->dof_count()) throw std::invalid_argument("FieldFunction: coefficient length mismatch");
}

FieldFunction::FieldFunction(SpacePtr s) : space(std::move(s)) {
  if (!space) throw std::invalid_argument("FieldFunction: null space");
  coefficients = Vector::Zero(space->dof_count());
}

namespace {

// Values of the scalar nodal functionals of one element family applied to f.
void nodal_values(const FESpace& space, const ScalarFn& f, const GradientFn& grad, Vector& out, int offset) {
  const Mesh& mesh = space.mesh();
  const int nv = mesh.vertex_count();
  switch (space.element()) {
    case ElementType::P0:
      for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto& v = mesh.vertices();
        out[offset + t] = f((1.0 / 3.0) * (v[tri[0]] + v[tri[1]] + v[tri[2]]));
      }
      break;
    case ElementType::P1Disc:
      for (int t = 0; t < mesh.triangle_count(); ++t)
        for (int i = 0; i < 3; ++i) out[offset + 3 * t + i] = f(mesh.vertices()[mesh.triangles()[t][i]]);
      break;
    case ElementType::P1:
    case ElementType::P2:
    case ElementType::Morley:
      for (int v = 0; v < nv; ++v) out[offset + v] = f(mesh.vertices()[v]);
      if (space.element() == ElementType::P1) break;
      for (int e = 0; e < mesh.edge_count(); ++e) {
        const auto& edge = mesh.edges()[e];
        const Point mid = 0.5 * (mesh.vertices()[edge[0]] + mesh.vertices()[edge[1]]);
        if (space.element() == ElementType::P2) {
          out[offset + nv + e] = f(mid);
        } else {
          if (!grad) throw std::invalid_argument("interpolate: Morley needs the gradient");
          out[offset + nv + e] = dot(grad(mid), edge_normal(mesh, e));
        }
      }
      break;
  }
}

}  // namespace

FieldFunction interpolate(SpacePtr space, const ScalarFn& f, const GradientFn& grad) {
  if (!space->is_scalar()) throw std::invalid_argument("interpolate: scalar space required");
  FieldFunction out(space);
  nodal_values(*space, f, grad, out.coefficients, 0);
  for (const auto& c : space->constraints())
    if (c.kind == ConstraintKind::Value && std::abs(out.coefficients[c.dof]) < 1e-14) out.coefficients[c.dof] = 0.0;
  return out;
}

FieldFunction interpolate_vector(SpacePtr space, const ScalarFn& fx, const ScalarFn& fy) {
  if (space->components() != 2) throw std::invalid_argument("interpolate_vector: vector space required");
  FieldFunction out(space);
  nodal_values(*space, fx, {}, out.coefficients, space->component_offset(0));
  nodal_values(*space, fy, {}, out.coefficients, space->component_offset(1));
  return out;
}

Sample sample(const FieldFunction& field, const ElementBasis& basis, int t, Point p, int comp) {
  const FESpace& space = *field.space;
  Sample s;
  if (comp == 2) {
    if (!space.has_pressure()) throw std::invalid_argument("sample: no pressure component");
    const auto& tri = space.mesh().triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const double c = field.coefficients[space.pressure_offset() + tri[i]];
      s.value += c * basis.value(i, p);
      const Point g = basis.gradient(i, p);
      s.gradient = s.gradient + c * g;
    }
    return s;
  }
  if (comp < 0 || comp >= space.components()) throw std::invalid_argument("sample: component out of range");
  const auto dofs = space.local_dofs(t);
  const int offset = space.component_offset(comp);
  for (int i = 0; i < basis.size(); ++i) {
    const double c = field.coefficients[offset + dofs[i]];
    if (c == 0.0) continue;
    s.value += c * basis.value(i, p);
    s.gradient = s.gradient + c * basis.gradient(i, p);
    const Hessian h = basis.hessian(i);
    s.hessian.xx += c * h.xx;
    s.hessian.xy += c * h.xy;
    s.hessian.yy += c * h.yy;
  }
  return s;
}

Sample sample(const FieldFunction& field, int t, Point p, int comp) {
  const ElementType type = comp == 2 ? ElementType::P1 : field.space->element();
  return sample(field, ElementBasis(field.space->mesh(), t, type), t, p, comp);
}

PointLocator::PointLocator(MeshPtr mesh) : mesh_(std::move(mesh)) {
  const auto& v = mesh_->vertices();
  double x1 = v[0].x, y1 = v[0].y;
  x0_ = x1;
  y0_ = y1;
  for (const auto& p : v) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  cell_ = std::max(mesh_->h(), 1e-300);
  nx_ = std::max(1, static_cast<int>((x1 - x0_) / cell_) + 1);
  ny_ = std::max(1, static_cast<int>((y1 - y0_) / cell_) + 1);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int t = 0; t < mesh_->triangle_count(); ++t) {
    const auto& tri = mesh_->triangles()[t];
    double bx0 = v[tri[0]].x, bx1 = bx0, by0 = v[tri[0]].y, by1 = by0;
    for (int i = 1; i < 3; ++i) {
      bx0 = std::min(bx0, v[tri[i]].x);
      bx1 = std::max(bx1, v[tri[i]].x);
      by0 = std::min(by0, v[tri[i]].y);
      by1 = std::max(by1, v[tri[i]].y);
    }
    const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((by0 - y0_) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((by1 - y0_) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

int PointLocator::locate(Point p) const {
  const int i = static_cast<int>(std::floor((p.x - x0_) / cell_));
  const int j = static_cast<int>(std::floor((p.y - y0_) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  const auto& v = mesh_->vertices();
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tri = mesh_->triangles()[t];
    const Point a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double twice = cross(b - a, c - a);
    const double l0 = cross(b - p, c - p) / twice;
    const double l1 = cross(c - p, a - p) / twice;
    const double l2 = 1.0 - l0 - l1;
    constexpr double tol = -1e-12;
    if (l0 >= tol && l1 >= tol && l2 >= tol) return t;
  }
  return -1;
}

Evaluation evaluate(const FieldFunction& field, std::span<const Point> points, int comp) {
  const PointLocator locator(field.space->mesh_ptr());
  Evaluation out;
  out.values.reserve(points.size());
  out.gradients.reserve(points.size());
  out.hessians.reserve(points.size());
  for (const Point& p : points) {
    const int t = locator.locate(p);
    if (t < 0) throw std::out_of_range("evaluate: point outside the mesh");
    const Sample s = sample(field, t, p, comp);
    out.values.push_back(s.value);
    out.gradients.push_back(s.gradient);
    out.hessians.push_back(s.hessian);
  }
  return out;
}

double integrate(const FieldFunction& field, const std::function<double(const Sample&, Point)>& g) {
  const FESpace& space = *field.space;
  const auto& rule = triangle_rule_degree4();
  double total = 0.0;
  for (int t = 0; t < space.mesh().triangle_count(); ++t) {
    const ElementBasis basis = space.basis(t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = basis.map(rule.points[q]);
      local += rule.weights[q] * g(sample(field, basis, t, x, 0), x);
    }
    total += local * basis.area();
  }
  return total;
}

double l2_norm(const FieldFunction& field) {
  return std::sqrt(integrate(field, [](const Sample& s, Point) { return s.value * s.value; }));
}

double l2_norm_vector(const FieldFunction& field) {
  const FESpace& space = *field.space;
  if (space.components() != 2) return l2_norm(field);
  const auto& rule = triangle_rule_degree4();
  double total = 0.0;
  for (int t = 0; t < space.mesh().triangle_count(); ++t) {
    const ElementBasis basis = space.basis(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = basis.map(rule.points[q]);
      const double u = sample(field, basis, t, x, 0).value;
      const double v = sample(field, basis, t, x, 1).value;
      total += rule.weights[q] * basis.area() * (u * u + v * v);
    }
  }
  return std::sqrt(total);
}

}  // namespace cflow
