#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cflow/field.hpp"
#include "cflow/linalg.hpp"

namespace cflow {

enum class ProblemKind { Dirichlet, Buckling, Stokes, ConstrainedVorticity };

std::string to_string(ProblemKind kind);
/// "dirichlet", "buckling", "stokes", "constrained"; throws std::invalid_argument.
ProblemKind parse_problem_kind(const std::string& name);

struct SpectrumOptions {
  int k = 1;
  double tol = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 20240601;
  Execution exec = Execution::Parallel;

  EigenOptions eigen() const;
};

/// One eigenpair with its derived fields.
///   Dirichlet:   field = u (P2, unit L2 norm)
///   Buckling:    field = psi (Morley, unit Dirichlet energy), vorticity = P1 Lap psi
///   Stokes:      field = u (P2 vector, unit L2 norm), pressure (P1, mean zero),
///                vorticity = P1 curl u
///   Constrained: field = w = P1 Lap psi (unit L2 norm), vorticity = same
/// Signs are fixed so that the largest-magnitude coefficient is positive.
struct Mode {
  double lambda = 0.0;
  double residual = 0.0;
  double residual_bound = 0.0;
  double divergence = 0.0;     // Stokes only
  double orthogonality = 0.0;  // Constrained only: harmonic pairing, degree 6
  FieldFunction field;
  FieldFunction vorticity;
  FieldFunction pressure;
};

struct SpectrumResult {
  DomainSpec domain = DomainSpec::disc(1.0);
  MeshPtr mesh;
  ProblemKind kind = ProblemKind::Dirichlet;
  SpectrumOptions options;
  int iterations = 0;
  std::vector<Mode> modes;
  /// Richardson estimates from this mesh and its parent (empty on the
  /// coarsest level).
  std::vector<double> extrapolated;

  double h() const { return mesh->h(); }
  std::vector<double> eigenvalues() const;
  std::vector<double> residuals() const;
  /// {domain, h, kind, eigenvalues, residuals, extrapolated, ...}
  nlohmann::json to_json() const;
};

/// k smallest eigenvalues of -Lap with zero boundary values, P2 elements.
SpectrumResult dirichlet_spectrum(MeshPtr mesh, const SpectrumOptions& options);
/// Clamped buckling problem on Morley: broken Hessian form against the
/// broken Dirichlet form.
SpectrumResult buckling_spectrum(MeshPtr mesh, const SpectrumOptions& options);
/// Stokes eigenproblem with no-slip, Taylor-Hood P2/P1.
SpectrumResult stokes_spectrum(MeshPtr mesh, const SpectrumOptions& options);
/// First mode of the harmonic-orthogonal vorticity problem, obtained as
/// w = Lap psi from the first buckling mode (options.k is ignored).
SpectrumResult constrained_vorticity_first(MeshPtr mesh, const SpectrumOptions& options);

SpectrumResult compute_spectrum(ProblemKind kind, MeshPtr mesh, const SpectrumOptions& options);

/// Spectra on build_mesh(spec, h) and levels-1 uniform refinements; level
/// i >= 1 carries the Richardson estimate from levels i-1 and i.
std::vector<SpectrumResult> spectrum_levels(ProblemKind kind, const DomainSpec& spec, double h, int levels,
                                            const SpectrumOptions& options);

/// fine + (fine - coarse) / (2^order - 1), entry-wise, for a halved mesh size.
std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine, double order = 2.0);

}  // namespace cflow
