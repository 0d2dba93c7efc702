#include "cflow/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "cflow/assembly.hpp"
#include "cflow/constraints.hpp"
#include "cflow/linalg.hpp"
#include "cflow/quadrature.hpp"

namespace cflow {
namespace {

SpacePtr p1_on(const FieldFunction& f, SpacePtr p1) {
  if (p1) {
    if (p1->kind() != SpaceKind::P1) throw std::invalid_argument("expected a P1 space");
    if (&p1->mesh() != &f.space->mesh()) throw std::invalid_argument("P1 space lives on a different mesh");
    return p1;
  }
  return make_space(f.space->mesh_ptr(), SpaceKind::P1);
}

// Piecewise evaluation of a field through one basis per triangle.
template <typename G>
PiecewiseFn per_triangle(const FieldFunction& field, G g) {
  return [&field, g](int t, std::span<const Point> x, std::span<double> out) {
    const ElementBasis basis = field.space->basis(t);
    for (std::size_t q = 0; q < x.size(); ++q) out[q] = g(field, basis, t, x[q]);
  };
}

// L2 norm of one component (comp 2: Taylor-Hood pressure).
double component_norm(const FieldFunction& f, int comp) {
  const Mesh& mesh = f.space->mesh();
  const auto& rule = triangle_rule_degree4();
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementBasis basis(mesh, t, comp == 2 ? ElementType::P1 : f.space->element());
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = sample(f, basis, t, basis.map(rule.points[q]), comp).value;
      total += rule.weights[q] * basis.area() * v * v;
    }
  }
  return std::sqrt(total);
}

double boundary_length(const Mesh& mesh) {
  double total = 0.0;
  for (double l : boundary_arc_measure(mesh)) total += l;
  return total;
}

// Visits Gauss points on boundary edges: (triangle, point, weight, tangent).
template <typename F>
void for_boundary_points(const Mesh& mesh, F&& visit) {
  const LineRule line = gauss_legendre(3);
  for (int e : mesh.boundary_edges()) {
    const int t = mesh.edge_triangles(e)[0];
    const auto& tri = mesh.triangles()[t];
    const auto& te = mesh.triangle_edges(t);
    const int local = static_cast<int>(std::find(te.begin(), te.end(), e) - te.begin());
    // Edge opposite local vertex i runs (i+1) -> (i+2): counter-clockwise
    // along the boundary for a positively oriented triangle.
    const Point a = mesh.vertices()[tri[(local + 1) % 3]];
    const Point b = mesh.vertices()[tri[(local + 2) % 3]];
    const double len = norm(b - a);
    const Point tangent = (1.0 / len) * (b - a);
    for (std::size_t q = 0; q < line.points.size(); ++q)
      visit(t, a + line.points[q] * (b - a), line.weights[q] * len, tangent);
  }
}

// sqrt(b^T G^{-1} b / |f|^2) for b_k = int f h_k, G_kl = int h_k h_l.
double span_pairing(const Mesh& mesh, const PiecewiseFn& f, int degree) {
  const auto family = harmonic_family(mesh, degree);
  const int n = static_cast<int>(family.size());
  const TriangleRule rule = conical_rule(5);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd pair = Eigen::VectorXd::Zero(n);
  double ff = 0.0;
  std::vector<Point> x(rule.points.size());
  std::vector<double> fx(rule.points.size());
  Eigen::VectorXd hx(n);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point a = mesh.vertices()[tri[0]], b = mesh.vertices()[tri[1]], c = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(t);
    for (std::size_t q = 0; q < x.size(); ++q) {
      const auto& l = rule.points[q];
      x[q] = l[0] * a + l[1] * b + l[2] * c;
    }
    f(t, x, fx);
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double w = rule.weights[q] * area;
      for (int k = 0; k < n; ++k) hx[k] = family[k](x[q]);
      gram.noalias() += w * hx * hx.transpose();
      pair += (w * fx[q]) * hx;
      ff += w * fx[q] * fx[q];
    }
  }
  if (ff == 0.0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("harmonic family Gram matrix is not positive definite");
  const Eigen::VectorXd y = llt.matrixL().solve(pair);
  return std::sqrt(std::max(0.0, y.squaredNorm() / ff));
}

}  // namespace

FieldFunction project_p1(SpacePtr p1, const PiecewiseFn& f) {
  if (!p1 || p1->kind() != SpaceKind::P1) throw std::invalid_argument("project_p1: P1 space required");
  const Mesh& mesh = p1->mesh();
  const auto& rule = triangle_rule_degree4();
  Vector rhs = Vector::Zero(p1->dof_count());
  std::vector<Point> x(rule.points.size());
  std::vector<double> fx(rule.points.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double area = mesh.triangle_area(t);
    for (std::size_t q = 0; q < x.size(); ++q) {
      const auto& l = rule.points[q];
      x[q] = l[0] * mesh.vertices()[tri[0]] + l[1] * mesh.vertices()[tri[1]] + l[2] * mesh.vertices()[tri[2]];
    }
    f(t, x, fx);
    for (std::size_t q = 0; q < x.size(); ++q)
      for (int i = 0; i < 3; ++i) rhs[tri[i]] += rule.weights[q] * area * rule.points[q][i] * fx[q];
  }
  const Factorization mass(assemble_mass(*p1), false);
  return FieldFunction(p1, mass.solve(rhs));
}

FieldFunction stream_to_velocity(const FieldFunction& psi) {
  if (!psi.space->is_scalar()) throw std::invalid_argument("stream_to_velocity: scalar stream function required");
  const Mesh& mesh = psi.space->mesh();
  auto space = make_space(psi.space->mesh_ptr(), SpaceKind::P1DiscVector);
  FieldFunction u(space);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementBasis basis = psi.space->basis(t);
    const auto dofs = space->local_dofs(t);
    for (int i = 0; i < 3; ++i) {
      const Point g = sample(psi, basis, t, mesh.vertices()[mesh.triangles()[t][i]], 0).gradient;
      u.coefficients[space->component_offset(0) + dofs[i]] = -g.y;
      u.coefficients[space->component_offset(1) + dofs[i]] = g.x;
    }
  }
  return u;
}

FieldFunction vorticity(const FieldFunction& velocity, SpacePtr p1) {
  if (velocity.space->components() != 2) throw std::invalid_argument("vorticity: velocity field required");
  return project_p1(p1_on(velocity, std::move(p1)),
                    per_triangle(velocity, [](const FieldFunction& u, const ElementBasis& b, int t, Point x) {
                      return sample(u, b, t, x, 1).gradient.x - sample(u, b, t, x, 0).gradient.y;
                    }));
}

FieldFunction laplacian(const FieldFunction& psi, SpacePtr p1) {
  if (!psi.space->is_scalar()) throw std::invalid_argument("laplacian: scalar field required");
  return project_p1(p1_on(psi, std::move(p1)),
                    per_triangle(psi, [](const FieldFunction& f, const ElementBasis& b, int t, Point x) {
                      return sample(f, b, t, x, 0).hessian.trace();
                    }));
}

FieldFunction harmonic_h(const FieldFunction& psi, double lambda, SpacePtr p1) {
  if (!psi.space->is_scalar()) throw std::invalid_argument("harmonic_h: scalar field required");
  return project_p1(p1_on(psi, std::move(p1)),
                    per_triangle(psi, [lambda](const FieldFunction& f, const ElementBasis& b, int t, Point x) {
                      const Sample s = sample(f, b, t, x, 0);
                      return s.hessian.trace() + lambda * s.value;
                    }));
}

double harmonicity_residual(const FieldFunction& h) {
  const FESpace& space = *h.space;
  if (space.kind() != SpaceKind::P1) throw std::invalid_argument("harmonicity_residual: P1 field required");
  const double norm = l2_norm(h);
  if (norm == 0.0) return 0.0;
  // h - H vanishes on the boundary and solves K_II e = (K h)_I.
  const SparseMatrix k = assemble_stiffness(space);
  const DofEmbedding interior = constraint_embedding(space, space.dof_count());
  const Factorization kii(interior.restrict(k), false);
  const FieldFunction e(h.space, interior.embed(Vector(kii.solve(interior.reduce(Vector(k * h.coefficients))))));
  return l2_norm(e) / norm;
}

FieldFunction pressure_from_h(const FieldFunction& h) {
  if (!h.space->is_scalar()) throw std::invalid_argument("pressure_from_h: scalar field required");
  const Mesh& mesh = h.space->mesh();
  auto space = make_space(h.space->mesh_ptr(), SpaceKind::P1DiscVector);
  FieldFunction gp(space);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementBasis basis = h.space->basis(t);
    const auto dofs = space->local_dofs(t);
    for (int i = 0; i < 3; ++i) {
      const Point g = sample(h, basis, t, mesh.vertices()[mesh.triangles()[t][i]], 0).gradient;
      gp.coefficients[space->component_offset(0) + dofs[i]] = g.y;
      gp.coefficients[space->component_offset(1) + dofs[i]] = -g.x;
    }
  }
  return gp;
}

TraceStats boundary_trace_stats(const FieldFunction& w, int comp) {
  const Mesh& mesh = w.space->mesh();
  std::vector<double> values, weights;
  for_boundary_points(mesh, [&](int t, Point x, double weight, Point) {
    values.push_back(sample(w, t, x, comp).value);
    weights.push_back(weight);
  });
  double length = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    length += weights[i];
    sum += weights[i] * values[i];
  }
  TraceStats s;
  s.mean = sum / length;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) var += weights[i] * (values[i] - s.mean) * (values[i] - s.mean);
  s.spread = std::sqrt(var / length);
  const double norm = component_norm(w, comp);
  s.dev = norm > 0.0 ? s.spread * std::sqrt(mesh.total_area()) / norm : 0.0;
  return s;
}

double boundary_derivative_norm(const FieldFunction& f, BoundaryDerivative which, double lambda, double ref_norm) {
  if (!(lambda > 0.0)) throw std::invalid_argument("boundary_derivative_norm: lambda must be positive");
  if (ref_norm == 0.0) return 0.0;
  const Mesh& mesh = f.space->mesh();
  double total = 0.0;
  for_boundary_points(mesh, [&](int t, Point x, double weight, Point tangent) {
    const Point g = sample(f, t, x, 0).gradient;
    const Point normal{tangent.y, -tangent.x};
    const double d = which == BoundaryDerivative::Normal ? dot(g, normal) : dot(g, tangent);
    total += weight * d * d;
  });
  return std::sqrt(total) * std::sqrt(mesh.total_area() / boundary_length(mesh)) / (std::sqrt(lambda) * ref_norm);
}

double neumann_pressure_norm(const FieldFunction& h, double lambda, double w_norm) {
  return boundary_derivative_norm(h, BoundaryDerivative::Tangential, lambda, w_norm);
}

SchifferResidual schiffer_residual(const FieldFunction& w, double lambda) {
  SchifferResidual r;
  r.dev_const = boundary_trace_stats(w).dev;
  r.neumann_norm = boundary_derivative_norm(w, BoundaryDerivative::Normal, lambda, l2_norm(w));
  return r;
}

std::vector<std::function<double(Point)>> harmonic_family(const Mesh& mesh, int degree) {
  if (degree < 0) throw std::invalid_argument("harmonic_family: negative degree");
  const auto& v = mesh.vertices();
  double x0 = v[0].x, x1 = v[0].x, y0 = v[0].y, y1 = v[0].y;
  for (const auto& p : v) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const Point centre{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
  const double scale = 0.5 * std::max(x1 - x0, y1 - y0);
  std::vector<std::function<double(Point)>> family;
  family.emplace_back([](Point) { return 1.0; });
  for (int m = 1; m <= degree; ++m) {
    auto zm = [=](Point p) { return std::pow(std::complex<double>((p.x - centre.x) / scale, (p.y - centre.y) / scale), m); };
    family.emplace_back([zm](Point p) { return zm(p).real(); });
    family.emplace_back([zm](Point p) { return zm(p).imag(); });
  }
  return family;
}

double orthogonality_check(const FieldFunction& w, int degree) {
  if (!w.space->is_scalar()) throw std::invalid_argument("orthogonality_check: scalar field required");
  return span_pairing(w.space->mesh(), per_triangle(w, [](const FieldFunction& f, const ElementBasis& b, int t, Point x) {
                        return sample(f, b, t, x, 0).value;
                      }),
                      degree);
}

double h20_membership_check(const FieldFunction& psi, int degree) {
  if (!psi.space->is_scalar()) throw std::invalid_argument("h20_membership_check: scalar field required");
  return span_pairing(psi.space->mesh(),
                      per_triangle(psi, [](const FieldFunction& f, const ElementBasis& b, int t, Point x) {
                        return sample(f, b, t, x, 0).hessian.trace();
                      }),
                      degree);
}

double twist_ratio(const FieldFunction& psi) {
  if (psi.space->kind() != SpaceKind::Morley) throw std::invalid_argument("twist_ratio: Morley field required");
  const double full = psi.coefficients.dot(assemble_morley_hessian(*psi.space) * psi.coefficients);
  if (full == 0.0) return 0.0;
  return std::abs(psi.coefficients.dot(assemble_morley_twist(*psi.space) * psi.coefficients)) / full;
}

}  // namespace cflow
