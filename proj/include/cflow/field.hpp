#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cflow/fe_space.hpp"
#include "cflow/sparse.hpp"

namespace cflow {

/// Coefficient vector over a finite-element space.
struct FieldFunction {
  SpacePtr space;
  Vector coefficients;

  FieldFunction() = default;
  FieldFunction(SpacePtr s, Vector c);
  explicit FieldFunction(SpacePtr s);  // zero field
};

/// Value, gradient and (piecewise) Hessian of one component at a point.
struct Sample {
  double value = 0.0;
  Point gradient{};
  Hessian hessian{};
};

using ScalarFn = std::function<double(Point)>;
using GradientFn = std::function<Point(Point)>;

/// Nodal interpolant on a scalar space. Morley needs the gradient for its
/// edge normal-derivative dofs.
FieldFunction interpolate(SpacePtr space, const ScalarFn& f, const GradientFn& grad = {});
/// Interpolant of a 2-vector field on P1DiscVector, P2Vector or the
/// velocity part of Taylor-Hood.
FieldFunction interpolate_vector(SpacePtr space, const ScalarFn& fx, const ScalarFn& fy);

/// Component `comp` on triangle t at p (p need not lie inside t; the local
/// polynomial is evaluated). For Taylor-Hood, comp 2 is the pressure.
Sample sample(const FieldFunction& field, int t, Point p, int comp = 0);
/// Same with a prebuilt basis for the component's element family.
Sample sample(const FieldFunction& field, const ElementBasis& basis, int t, Point p, int comp = 0);

/// Bucket grid over triangle bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(MeshPtr mesh);
  /// Triangle containing p (boundary inclusive), or -1.
  int locate(Point p) const;

 private:
  MeshPtr mesh_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

struct Evaluation {
  std::vector<double> values;
  std::vector<Point> gradients;
  std::vector<Hessian> hessians;
};

/// Evaluates one component at arbitrary points. Throws std::out_of_range if
/// a point lies outside the mesh.
Evaluation evaluate(const FieldFunction& field, std::span<const Point> points, int comp = 0);

/// Quadrature of g(t, x, sample(component 0)) over all elements with the
/// rule matching the space.
double integrate(const FieldFunction& field, const std::function<double(const Sample&, Point)>& g);
double l2_norm(const FieldFunction& field);
/// L2 norm of the velocity (both components) for vector spaces.
double l2_norm_vector(const FieldFunction& field);

}  // namespace cflow
