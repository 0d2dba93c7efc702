#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cflow/spectra.hpp"

namespace cflow {

/// Residual functionals of the first buckling mode on one mesh. All are
/// dimensionless and vanish in the continuum limit on the disc.
struct RigidityReport {
  DomainSpec domain = DomainSpec::disc(1.0);
  double h = 0.0;
  double lambda = 0.0;
  double dev_w = 0.0;         // boundary-trace spread of w = Lap psi
  double neumann_p = 0.0;     // dp/dn from h = w + lambda psi
  double schiffer_dev = 0.0;  // constancy part of the Schiffer residual
  double schiffer_dn = 0.0;   // |dw/dn| on the boundary
  double harm_res = 0.0;      // distance of h from its harmonic extension
  double ortho_res = 0.0;     // harmonic-polynomial pairing of w

  static std::string csv_header();
  std::string csv_row() const;
  nlohmann::json to_json() const;
};

RigidityReport rigidity_report(const SpectrumResult& buckling);
RigidityReport rigidity_report(MeshPtr mesh, const SpectrumOptions& options);

/// Reports on build_mesh(spec, h) and levels-1 refinements.
std::vector<RigidityReport> rigidity_levels(const DomainSpec& spec, double h, int levels,
                                            const SpectrumOptions& options);

}  // namespace cflow
