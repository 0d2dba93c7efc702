#include "cflow/rigidity.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cflow/equivalence.hpp"
#include "cflow/format.hpp"

namespace cflow {

RigidityReport rigidity_report(const SpectrumResult& buckling) {
  if (buckling.kind != ProblemKind::Buckling || buckling.modes.empty())
    throw std::invalid_argument("rigidity_report: first buckling mode required");
  const Mode& mode = buckling.modes.front();
  RigidityReport r;
  r.domain = buckling.domain;
  r.h = buckling.h();
  r.lambda = mode.lambda;
  const FieldFunction& w = mode.vorticity;
  const FieldFunction h = harmonic_h(mode.field, mode.lambda, w.space);
  const SchifferResidual s = schiffer_residual(w, mode.lambda);
  r.dev_w = boundary_trace_stats(w).dev;
  r.neumann_p = neumann_pressure_norm(h, mode.lambda, l2_norm(w));
  r.schiffer_dev = s.dev_const;
  r.schiffer_dn = s.neumann_norm;
  r.harm_res = harmonicity_residual(h);
  r.ortho_res = orthogonality_check(w, 6);
  return r;
}

RigidityReport rigidity_report(MeshPtr mesh, const SpectrumOptions& options) {
  SpectrumOptions first = options;
  first.k = 1;
  return rigidity_report(buckling_spectrum(std::move(mesh), first));
}

std::vector<RigidityReport> rigidity_levels(const DomainSpec& spec, double h, int levels,
                                            const SpectrumOptions& options) {
  if (levels < 1) throw std::invalid_argument("rigidity_levels: levels must be >= 1");
  std::vector<RigidityReport> out;
  for (const MeshPtr& mesh : mesh_hierarchy(spec, h, levels)) out.push_back(rigidity_report(mesh, options));
  return out;
}

std::string RigidityReport::csv_header() {
  return "domain-id,h,lambda,dev_w,neumann_p,schiffer_dev,schiffer_dn,harm_res,ortho_res";
}

std::string RigidityReport::csv_row() const {
  std::ostringstream os;
  os << domain.id();
  for (double v : {h, lambda, dev_w, neumann_p, schiffer_dev, schiffer_dn, harm_res, ortho_res})
    os << ',' << format_double(v);
  return os.str();
}

nlohmann::json RigidityReport::to_json() const {
  return {{"domain", domain.to_json()}, {"domain_id", domain.id()}, {"h", h},
          {"lambda", lambda}, {"dev_w", dev_w}, {"neumann_p", neumann_p},
          {"schiffer_dev", schiffer_dev}, {"schiffer_dn", schiffer_dn}, {"harm_res", harm_res},
          {"ortho_res", ortho_res}};
}

}  // namespace cflow
