#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cflow/field.hpp"

namespace cflow {

/// Evaluates a piecewise quantity on triangle t at the given points.
using PiecewiseFn = std::function<void(int t, std::span<const Point> x, std::span<double> out)>;

/// L2 projection onto a P1 space of a quantity known pointwise on each
/// triangle (it may be discontinuous across edges).
FieldFunction project_p1(SpacePtr p1, const PiecewiseFn& f);

/// u = (-d2 psi, d1 psi) as a broken P1 vector field, so that curl u equals
/// the piecewise Laplacian of psi.
FieldFunction stream_to_velocity(const FieldFunction& psi);

/// P1 projection of the piecewise curl d1 u2 - d2 u1 of a velocity field
/// (P1DiscVector, P2Vector or Taylor-Hood).
FieldFunction vorticity(const FieldFunction& velocity, SpacePtr p1 = nullptr);

/// P1 projection of the piecewise Laplacian of a scalar field.
FieldFunction laplacian(const FieldFunction& psi, SpacePtr p1 = nullptr);

/// h = Lap psi + lambda psi, projected onto P1.
FieldFunction harmonic_h(const FieldFunction& psi, double lambda, SpacePtr p1 = nullptr);

/// Relative L2 distance |h - H| / |h| of a P1 field from the discrete
/// harmonic extension H of its own boundary trace.
double harmonicity_residual(const FieldFunction& h);

/// grad p = -rot-grad h = (d2 h, -d1 h), piecewise constant (broken P1 vector).
FieldFunction pressure_from_h(const FieldFunction& h);

struct TraceStats {
  double mean = 0.0;
  double spread = 0.0;  // arc-length weighted standard deviation
  double dev = 0.0;     // spread / (|w|_L2(Omega) / |Omega|^(1/2))
};

/// Boundary trace statistics of component comp of a field.
TraceStats boundary_trace_stats(const FieldFunction& w, int comp = 0);

/// Dimensionless boundary norm of a directional derivative:
///   |d f|_L2(dOmega) |Omega|^(1/2) / (sqrt(lambda) |w_ref|_L2(Omega) |dOmega|^(1/2)).
/// Derivatives come from one-sided element gradients on boundary triangles.
enum class BoundaryDerivative { Normal, Tangential };
double boundary_derivative_norm(const FieldFunction& f, BoundaryDerivative which, double lambda, double ref_norm);

/// Neumann trace of the pressure recovered from h: dp/dn equals the
/// tangential derivative of h along the counter-clockwise boundary.
/// Normalized by |w|_L2 of the vorticity that produced h.
double neumann_pressure_norm(const FieldFunction& h, double lambda, double w_norm);

struct SchifferResidual {
  double dev_const = 0.0;     // boundary constancy of w
  double neumann_norm = 0.0;  // normalized |dw/dn|_L2(dOmega)
};

SchifferResidual schiffer_residual(const FieldFunction& w, double lambda);

/// Harmonic polynomials 1, Re z^m, Im z^m (1 <= m <= degree) about the
/// centre of the mesh bounding box, scaled by its half-width.
std::vector<std::function<double(Point)>> harmonic_family(const Mesh& mesh, int degree);

/// sup over h in span(harmonic_family) of |int w h| / (|w| |h|), i.e. the
/// relative L2 size of w's projection onto the family's span. Bounds every
/// individual normalized pairing from above.
double orthogonality_check(const FieldFunction& w, int degree = 6);

/// Same pairing applied to the piecewise Laplacian of psi: near zero when psi
/// is clamped, away from zero for merely vanishing traces.
double h20_membership_check(const FieldFunction& psi, int degree = 6);

/// Piecewise int (psi_xy^2 - psi_xx psi_yy) relative to int |D^2 psi|^2 on a
/// Morley field. Vanishes for clamped smooth fields in the limit.
double twist_ratio(const FieldFunction& psi);

}  // namespace cflow
