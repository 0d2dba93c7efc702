#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cflow/field.hpp"

namespace cflow {

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> energy;      // int |v|^2
  std::vector<double> divergence;  // |B v| after each step (0 at t = 0 is |B v0|)
  double nu = 1.0;
  double dt = 0.0;
  double final_time = 0.0;
  /// -slope of log E(t) by least squares over [0.2 T, T].
  double decay_rate_fit = 0.0;
  /// max_n | v_n/|v_n| - v_0/|v_0| |_L2 (shape preservation).
  double shape_deviation = 0.0;
  FieldFunction final_state;

  /// CSV rows "t,E,divergence_residual" with a header.
  std::string to_csv() const;
};

/// Crank-Nicolson for dv/dt = nu Lap v, div v = 0, v = 0 on the boundary,
/// on the Taylor-Hood velocity space of u0 (a P2Vector field). Each step
/// solves [M + dt nu/2 A, B^T; B, 0]. u0 must be no-slip and discretely
/// divergence-free to within div_tol (relative to |u0|_M).
EvolutionTrace stokes_heat_evolve(const FieldFunction& u0, double nu, double dt, double final_time,
                                  double div_tol = 1e-8);

/// Defaults T = 3 / (2 nu lambda), dt = T / 60.
double default_final_time(double nu, double lambda);
double default_step(double final_time);

/// Least-squares decay rate of log E over [t0, t1]; zero energy gives 0.
double fit_decay_rate(const EvolutionTrace& trace, double t0, double t1);

/// min_n [ E(0) - exp(2 nu lambda t_n) E(t_n) ]. Non-negative (to rounding)
/// whenever the energy decays at least at the first-eigenvalue rate.
double dissipation_check(const EvolutionTrace& trace, double lambda, double nu);

/// |(u . grad) w|_L2 |Omega|^(1/2) / (|u|_L2 |grad w|_L2): zero when u is
/// tangent to the level sets of w. u is a velocity field, w a scalar field
/// on the same mesh.
double transport_residual(const FieldFunction& u, const FieldFunction& w);

/// Summary fields for the evolve command.
nlohmann::json summary_json(const EvolutionTrace& trace, double lambda, double margin, double transport);

}  // namespace cflow
