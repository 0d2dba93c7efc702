#include "cflow/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cflow/assembly.hpp"
#include "cflow/constraints.hpp"
#include "cflow/equivalence.hpp"

namespace cflow {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Dirichlet: return "dirichlet";
    case ProblemKind::Buckling: return "buckling";
    case ProblemKind::Stokes: return "stokes";
    case ProblemKind::ConstrainedVorticity: return "constrained";
  }
  return "?";
}

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "dirichlet") return ProblemKind::Dirichlet;
  if (name == "buckling") return ProblemKind::Buckling;
  if (name == "stokes") return ProblemKind::Stokes;
  if (name == "constrained") return ProblemKind::ConstrainedVorticity;
  throw std::invalid_argument("unknown problem kind '" + name + "'");
}

EigenOptions SpectrumOptions::eigen() const {
  if (!(tol > 0.0)) throw std::invalid_argument("spectrum: tolerance must be positive");
  EigenOptions o;
  o.k = k;
  o.tol = tol;
  o.max_iterations = max_iterations;
  o.seed = seed;
  o.exec = exec;
  return o;
}

namespace {

void fix_sign(Vector& v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0.0) v = -v;
}

SpectrumResult start(MeshPtr mesh, ProblemKind kind, const SpectrumOptions& options) {
  if (!mesh) throw std::invalid_argument("spectrum: null mesh");
  SpectrumResult r;
  r.domain = mesh->domain();
  r.mesh = std::move(mesh);
  r.kind = kind;
  r.options = options;
  return r;
}

}  // namespace

SpectrumResult dirichlet_spectrum(MeshPtr mesh, const SpectrumOptions& options) {
  SpectrumResult result = start(std::move(mesh), ProblemKind::Dirichlet, options);
  auto space = make_space(result.mesh, SpaceKind::P2);
  const auto reduced =
      apply_constraints({assemble_stiffness(*space, options.exec), assemble_mass(*space, options.exec)}, *space);
  const EigenRun run = eigs_smallest(reduced.matrices[0], reduced.matrices[1], options.eigen());
  result.iterations = run.iterations;
  for (const auto& pair : run.pairs) {
    Mode mode;
    mode.lambda = pair.lambda;
    mode.residual = pair.residual;
    mode.residual_bound = pair.residual_bound;
    Vector full = reduced.embedding.embed(pair.vector);
    fix_sign(full);
    mode.field = FieldFunction(space, std::move(full));
    result.modes.push_back(std::move(mode));
  }
  return result;
}

SpectrumResult buckling_spectrum(MeshPtr mesh, const SpectrumOptions& options) {
  SpectrumResult result = start(std::move(mesh), ProblemKind::Buckling, options);
  auto space = make_space(result.mesh, SpaceKind::Morley);
  auto p1 = make_space(result.mesh, SpaceKind::P1);
  const auto reduced = apply_constraints(
      {assemble_morley_hessian(*space, options.exec), assemble_stiffness(*space, options.exec)}, *space);
  const EigenRun run = eigs_smallest(reduced.matrices[0], reduced.matrices[1], options.eigen());
  result.iterations = run.iterations;
  for (const auto& pair : run.pairs) {
    Mode mode;
    mode.lambda = pair.lambda;
    mode.residual = pair.residual;
    mode.residual_bound = pair.residual_bound;
    Vector full = reduced.embedding.embed(pair.vector);
    fix_sign(full);
    mode.field = FieldFunction(space, std::move(full));
    mode.vorticity = laplacian(mode.field, p1);
    result.modes.push_back(std::move(mode));
  }
  return result;
}

SpectrumResult stokes_spectrum(MeshPtr mesh, const SpectrumOptions& options) {
  SpectrumResult result = start(std::move(mesh), ProblemKind::Stokes, options);
  auto th = make_space(result.mesh, SpaceKind::TaylorHood);
  auto velocity = make_space(result.mesh, SpaceKind::P2Vector);
  auto p1 = make_space(result.mesh, SpaceKind::P1);
  const StokesSystem sys = assemble_stokes_system(*th, options.exec);
  const DofEmbedding emb = constraint_embedding(*th, th->velocity_dofs());
  const SparseMatrix pressure_mass = assemble_mass(*p1, options.exec);
  const StokesEigenRun run = eigs_stokes(emb.restrict(sys.a), emb.restrict_columns(sys.b), emb.restrict(sys.m),
                                         options.eigen(), &pressure_mass);
  result.iterations = run.iterations;
  for (const auto& pair : run.pairs) {
    Mode mode;
    mode.lambda = pair.lambda;
    mode.residual = pair.residual;
    mode.residual_bound = pair.residual_bound;
    mode.divergence = pair.divergence;
    Vector u = emb.embed(pair.velocity);
    Vector p = pair.pressure;
    Eigen::Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u[at] < 0.0) {
      u = -u;
      p = -p;
    }
    mode.field = FieldFunction(velocity, std::move(u));
    mode.pressure = FieldFunction(p1, std::move(p));
    mode.vorticity = vorticity(mode.field, p1);
    result.modes.push_back(std::move(mode));
  }
  return result;
}

SpectrumResult constrained_vorticity_first(MeshPtr mesh, const SpectrumOptions& options) {
  SpectrumOptions first = options;
  first.k = 1;
  SpectrumResult result = buckling_spectrum(std::move(mesh), first);
  result.kind = ProblemKind::ConstrainedVorticity;
  Mode& mode = result.modes.front();
  FieldFunction w = mode.vorticity;
  w.coefficients /= l2_norm(w);
  mode.field = w;
  mode.vorticity = std::move(w);
  mode.orthogonality = orthogonality_check(mode.field, 6);
  return result;
}

SpectrumResult compute_spectrum(ProblemKind kind, MeshPtr mesh, const SpectrumOptions& options) {
  switch (kind) {
    case ProblemKind::Dirichlet: return dirichlet_spectrum(std::move(mesh), options);
    case ProblemKind::Buckling: return buckling_spectrum(std::move(mesh), options);
    case ProblemKind::Stokes: return stokes_spectrum(std::move(mesh), options);
    case ProblemKind::ConstrainedVorticity: return constrained_vorticity_first(std::move(mesh), options);
  }
  throw std::invalid_argument("compute_spectrum: unknown kind");
}

std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine, double order) {
  if (coarse.size() != fine.size()) throw std::invalid_argument("richardson: length mismatch");
  const double denom = std::pow(2.0, order) - 1.0;
  std::vector<double> out(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) out[i] = fine[i] + (fine[i] - coarse[i]) / denom;
  return out;
}

std::vector<SpectrumResult> spectrum_levels(ProblemKind kind, const DomainSpec& spec, double h, int levels,
                                            const SpectrumOptions& options) {
  if (levels < 1) throw std::invalid_argument("spectrum_levels: levels must be >= 1");
  std::vector<SpectrumResult> out;
  for (const MeshPtr& mesh : mesh_hierarchy(spec, h, levels)) {
    out.push_back(compute_spectrum(kind, mesh, options));
    if (out.size() > 1)
      out.back().extrapolated = richardson(out[out.size() - 2].eigenvalues(), out.back().eigenvalues());
  }
  return out;
}

std::vector<double> SpectrumResult::eigenvalues() const {
  std::vector<double> v;
  for (const auto& m : modes) v.push_back(m.lambda);
  return v;
}

std::vector<double> SpectrumResult::residuals() const {
  std::vector<double> v;
  for (const auto& m : modes) v.push_back(m.residual);
  return v;
}

nlohmann::json SpectrumResult::to_json() const {
  nlohmann::json j;
  j["domain"] = domain.to_json();
  j["domain_id"] = domain.id();
  j["h"] = h();
  j["kind"] = to_string(kind);
  j["eigenvalues"] = eigenvalues();
  j["residuals"] = residuals();
  std::vector<double> bounds;
  for (const auto& m : modes) bounds.push_back(m.residual_bound);
  j["residual_bounds"] = bounds;
  j["extrapolated"] = extrapolated;
  if (kind == ProblemKind::Stokes) {
    std::vector<double> div;
    for (const auto& m : modes) div.push_back(m.divergence);
    j["divergence_residuals"] = div;
  }
  if (kind == ProblemKind::ConstrainedVorticity) j["orthogonality"] = modes.front().orthogonality;
  j["iterations"] = iterations;
  j["mesh"] = {{"vertices", mesh->vertex_count()}, {"triangles", mesh->triangle_count()}};
  j["solver"] = {{"k", options.k}, {"tol", options.tol}, {"max_iterations", options.max_iterations},
                 {"seed", options.seed}};
  return j;
}

}  // namespace cflow
