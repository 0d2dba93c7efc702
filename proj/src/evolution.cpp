#include "cflow/evolution.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cflow/assembly.hpp"
#include "cflow/constraints.hpp"
#include "cflow/format.hpp"
#include "cflow/linalg.hpp"
#include "cflow/quadrature.hpp"

namespace cflow {

double default_final_time(double nu, double lambda) {
  if (!(nu > 0.0) || !(lambda > 0.0)) throw std::invalid_argument("default_final_time: nu and lambda must be positive");
  return 3.0 / (2.0 * nu * lambda);
}

double default_step(double final_time) { return final_time / 60.0; }

EvolutionTrace stokes_heat_evolve(const FieldFunction& u0, double nu, double dt, double final_time, double div_tol) {
  if (!(nu > 0.0)) throw std::invalid_argument("evolve: viscosity must be positive");
  if (!(dt > 0.0) || !(final_time > 0.0)) throw std::invalid_argument("evolve: dt and T must be positive");
  if (dt > final_time / 10.0 * (1.0 + 1e-12)) throw std::invalid_argument("evolve: dt must not exceed T/10");
  if (u0.space->kind() != SpaceKind::P2Vector) throw std::invalid_argument("evolve: initial velocity must be P2Vector");

  const auto th = make_space(u0.space->mesh_ptr(), SpaceKind::TaylorHood);
  const StokesSystem sys = assemble_stokes_system(*th);
  const DofEmbedding emb = constraint_embedding(*th, th->velocity_dofs());
  const SparseMatrix a = emb.restrict(sys.a);
  const SparseMatrix m = emb.restrict(sys.m);
  const SparseMatrix b = emb.restrict_columns(sys.b);

  // No-slip check before the constrained dofs are dropped.
  for (const auto& c : th->constraints())
    if (c.dof < th->velocity_dofs() && std::abs(u0.coefficients[c.dof]) > 1e-12 * (1.0 + u0.coefficients.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("evolve: initial velocity violates the no-slip condition");

  Vector v = emb.reduce(u0.coefficients);
  const double e0 = v.dot(m * v);
  const double div0 = (b * v).norm();
  if (div0 > div_tol * std::max(1.0, std::sqrt(e0)))
    throw std::invalid_argument("evolve: initial velocity is not discretely divergence-free");

  const int steps = static_cast<int>(std::llround(final_time / dt));
  const double tau = final_time / steps;
  const SparseMatrix lhs = m + (0.5 * tau * nu) * a;
  const SparseMatrix rhs_op = m - (0.5 * tau * nu) * a;
  const SaddlePointSolver solver(lhs, b);

  EvolutionTrace trace;
  trace.nu = nu;
  trace.dt = tau;
  trace.final_time = final_time;
  trace.times.push_back(0.0);
  trace.energy.push_back(e0);
  trace.divergence.push_back(div0);
  const Vector shape0 = e0 > 0.0 ? Vector(v / std::sqrt(e0)) : Vector(v);
  for (int n = 1; n <= steps; ++n) {
    v = solver.solve(Vector(rhs_op * v));
    const double e = v.dot(m * v);
    trace.times.push_back(n * tau);
    trace.energy.push_back(e);
    trace.divergence.push_back((b * v).norm());
    if (e > 0.0) {
      const Vector d = v / std::sqrt(e) - shape0;
      trace.shape_deviation = std::max(trace.shape_deviation, std::sqrt(std::max(0.0, d.dot(m * d))));
    }
  }
  trace.decay_rate_fit = fit_decay_rate(trace, 0.2 * final_time, final_time);
  trace.final_state = FieldFunction(u0.space, emb.embed(v));
  return trace;
}

double fit_decay_rate(const EvolutionTrace& trace, double t0, double t1) {
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double eps = 1e-12 * (t1 - t0);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t < t0 - eps || t > t1 + eps) continue;
    if (!(trace.energy[i] > 0.0)) return 0.0;
    const double y = std::log(trace.energy[i]);
    n += 1.0;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  if (n < 2.0) throw std::invalid_argument("fit_decay_rate: fewer than two samples in the window");
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  return -slope;
}

double dissipation_check(const EvolutionTrace& trace, double lambda, double nu) {
  if (trace.energy.empty()) return 0.0;
  double margin = INFINITY;
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    margin = std::min(margin, trace.energy.front() - std::exp(2.0 * nu * lambda * trace.times[i]) * trace.energy[i]);
  return margin;
}

double transport_residual(const FieldFunction& u, const FieldFunction& w) {
  if (u.space->components() != 2) throw std::invalid_argument("transport_residual: velocity field required");
  if (!w.space->is_scalar()) throw std::invalid_argument("transport_residual: scalar vorticity required");
  if (&u.space->mesh() != &w.space->mesh()) throw std::invalid_argument("transport_residual: fields on different meshes");
  const Mesh& mesh = u.space->mesh();
  const auto& rule = triangle_rule_degree4();
  double adv = 0.0, uu = 0.0, gg = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementBasis bu = u.space->basis(t);
    const ElementBasis bw = w.space->basis(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Point x = bu.map(rule.points[q]);
      const double wq = rule.weights[q] * bu.area();
      const Point vel{sample(u, bu, t, x, 0).value, sample(u, bu, t, x, 1).value};
      const Point g = sample(w, bw, t, x, 0).gradient;
      const double d = dot(vel, g);
      adv += wq * d * d;
      uu += wq * dot(vel, vel);
      gg += wq * dot(g, g);
    }
  }
  if (uu == 0.0 || gg == 0.0) return 0.0;
  return std::sqrt(adv * mesh.total_area() / (uu * gg));
}

std::string EvolutionTrace::to_csv() const {
  std::ostringstream os;
  os << "t,E,divergence_residual\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    os << format_double(times[i]) << ',' << format_double(energy[i]) << ',' << format_double(divergence[i]) << '\n';
  return os.str();
}

nlohmann::json summary_json(const EvolutionTrace& trace, double lambda, double margin, double transport) {
  nlohmann::json j;
  j["nu"] = trace.nu;
  j["dt"] = trace.dt;
  j["T"] = trace.final_time;
  j["steps"] = static_cast<int>(trace.times.size()) - 1;
  j["lambda1"] = lambda;
  j["decay_rate_fit"] = trace.decay_rate_fit;
  j["decay_rate_expected"] = 2.0 * trace.nu * lambda;
  j["decay_rate_relative_error"] =
      lambda > 0.0 ? std::abs(trace.decay_rate_fit - 2.0 * trace.nu * lambda) / (2.0 * trace.nu * lambda) : 0.0;
  j["dissipation_margin"] = margin;
  j["dissipation_margin_relative"] = trace.energy.empty() || trace.energy.front() == 0.0 ? 0.0 : margin / trace.energy.front();
  j["shape_deviation"] = trace.shape_deviation;
  j["transport_residual"] = transport;
  double div = 0.0;
  for (double d : trace.divergence) div = std::max(div, d);
  j["max_divergence_residual"] = div;
  return j;
}

}  // namespace cflow
