// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Expensive solves are shared between criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cflow/cli.hpp"
#include "cflow/equivalence.hpp"
#include "cflow/evolution.hpp"
#include "cflow/oracles.hpp"
#include "cflow/rigidity.hpp"
#include "cflow/spectra.hpp"

using namespace cflow;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail, double seconds) {
  std::printf("%s  %2d  %s: %s  [%.1fs]\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Observed orders between successive entries of a refinement sequence.
std::vector<double> orders(const std::vector<double>& v) {
  std::vector<double> o;
  for (std::size_t i = 1; i < v.size(); ++i) o.push_back(std::log2(v[i - 1] / v[i]));
  return o;
}

std::string join(const std::vector<double>& v, const char* f = "%.3g") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(f, v[i]);
  return s;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// Non-decreasing up to a relative slack.
bool non_decreasing(const std::vector<double>& v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < (1.0 - slack) * v[i - 1]) return false;
  return true;
}

// Richardson-extrapolated eigenvalue index i of the finest level.
double extrapolated(const std::vector<SpectrumResult>& levels, std::size_t i) { return levels.back().extrapolated.at(i); }

SpectrumOptions opts(int k) {
  SpectrumOptions o;
  o.k = k;
  return o;
}

const DomainSpec kDisc = DomainSpec::disc(1.0);
const DomainSpec kSquare = DomainSpec::rectangle(1.0, 1.0);
const DomainSpec kEllipse15 = DomainSpec::ellipse(1.5, 1.0);
const DomainSpec kEllipse13 = DomainSpec::ellipse(1.3, 1.0);
const DomainSpec kFourier = DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05});

// Spectra on h = 0.05 and its refinement (finest target h = 0.025).
constexpr double kCoarse = 0.05;

std::vector<SpectrumResult> two_levels(ProblemKind kind, const DomainSpec& d, int k) {
  return spectrum_levels(kind, d, kCoarse, 2, opts(k));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

int run_cli_args(std::vector<std::string> args) {
  args.insert(args.begin(), "cflow");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

int main() {
  const auto disc_ref = oracles::disc_reference(1.0);
  const double j01_sq = std::pow(oracles::bessel_zero(0, 1), 2), j11_sq = std::pow(oracles::bessel_zero(1, 1), 2);

  // 1. Disc Dirichlet spectrum against the Bessel zeros.
  auto t0 = Clock::now();
  const auto disc_d = two_levels(ProblemKind::Dirichlet, kDisc, 2);
  {
    const double l1 = extrapolated(disc_d, 0), l2 = extrapolated(disc_d, 1);
    report(1, rel(l1, j01_sq) <= 0.01 && rel(l2, j11_sq) <= 0.01, "disc Dirichlet lambda1, lambda2 vs Bessel zeros",
           fmt("lambda1=%.6f (ref %.6f, rel %.1e)  lambda2=%.6f (ref %.6f, rel %.1e)", l1, j01_sq, rel(l1, j01_sq), l2,
               j11_sq, rel(l2, j11_sq)),
           seconds_since(t0));
  }

  // 2. Weinstein equality on the disc.
  t0 = Clock::now();
  const auto disc_b = two_levels(ProblemKind::Buckling, kDisc, 1);
  {
    const double b1 = extrapolated(disc_b, 0), d2 = extrapolated(disc_d, 1);
    report(2, rel(b1, d2) <= 0.01, "Weinstein equality on the disc",
           fmt("lambda1_B=%.6f lambda2_D=%.6f gap=%.1e", b1, d2, rel(b1, d2)), seconds_since(t0));
  }

  // 3. Strict Weinstein inequality on the square and the 1.5:1 ellipse.
  t0 = Clock::now();
  std::map<std::string, double> buckling_best;
  buckling_best[kDisc.id()] = extrapolated(disc_b, 0);
  {
    bool pass = true;
    std::string detail;
    for (const DomainSpec& d : {kSquare, kEllipse15}) {
      const double d2 = extrapolated(two_levels(ProblemKind::Dirichlet, d, 2), 1);
      const double b1 = extrapolated(two_levels(ProblemKind::Buckling, d, 1), 0);
      buckling_best[d.id()] = b1;
      const double gap = (b1 - d2) / d2;
      pass = pass && gap >= 0.05;
      detail += fmt("%s: lambda1_B=%.5f lambda2_D=%.5f gap=%.2f%%  ", d.id().c_str(), b1, d2, 100 * gap);
    }
    report(3, pass, "Weinstein strict inequality off the disc", detail, seconds_since(t0));
  }

  // 4. Buckling (Morley) vs Stokes (Taylor-Hood) first eigenvalue.
  t0 = Clock::now();
  {
    bool pass = true;
    std::string detail;
    for (const DomainSpec& d : {kDisc, kSquare, kEllipse13, kFourier}) {
      if (!buckling_best.count(d.id())) buckling_best[d.id()] = extrapolated(two_levels(ProblemKind::Buckling, d, 1), 0);
      const double b1 = buckling_best[d.id()];
      const double s1 = stokes_spectrum(build_mesh(d, kCoarse), opts(1)).modes[0].lambda;
      pass = pass && rel(b1, s1) <= 0.02;
      detail += fmt("%s: B=%.5f S=%.5f rel=%.1e  ", d.id().c_str(), b1, s1, rel(b1, s1));
    }
    report(4, pass, "buckling-Stokes equality", detail, seconds_since(t0));
  }

  // Rigidity sequences shared by criteria 5 and 6. The disc runs one level
  // further (finest h = 0.00625), the largest that fits the desk budget.
  t0 = Clock::now();
  std::map<std::string, std::vector<RigidityReport>> rig;
  std::map<std::string, double> rig_seconds;
  for (const auto& [d, levels] : std::vector<std::pair<DomainSpec, int>>{
           {kDisc, 4}, {kEllipse15, 3}, {kSquare, 3}, {kEllipse13, 3}, {kFourier, 3}}) {
    const auto s = Clock::now();
    rig[d.id()] = rigidity_levels(d, kCoarse, levels, opts(1));
    rig_seconds[d.id()] = seconds_since(s);
  }

  // 5. Harmonicity of h, observed order >= 1 on every test domain.
  {
    bool pass = true;
    std::string detail;
    for (const auto& [id, reports] : rig) {
      std::vector<double> res;
      for (const auto& r : reports) res.push_back(r.harm_res);
      const auto o = orders(res);
      const double worst = *std::min_element(o.begin(), o.end());
      pass = pass && strictly_decreasing(res) && worst >= 1.0;
      detail += fmt("%s: [%s] order>=%.2f  ", id.c_str(), join(res).c_str(), worst);
    }
    report(5, pass, "harmonicity residual of h", detail, seconds_since(t0));
  }

  // 6. Rigidity dichotomy.
  {
    auto column = [&](const std::string& id, double RigidityReport::*field) {
      std::vector<double> v;
      for (const auto& r : rig[id]) v.push_back(r.*field);
      return v;
    };
    bool pass = true;
    std::string detail;
    const auto dev = column(kDisc.id(), &RigidityReport::dev_w), np = column(kDisc.id(), &RigidityReport::neumann_p);
    pass = pass && dev.back() <= 0.02 && np.back() <= 0.02 && strictly_decreasing(dev) && strictly_decreasing(np);
    detail += fmt("disc h=%.4f dev_w=[%s] neumann_p=[%s]  ", rig[kDisc.id()].back().h, join(dev).c_str(), join(np).c_str());
    for (const DomainSpec& d : {kEllipse15, kSquare}) {
      const auto dv = column(d.id(), &RigidityReport::dev_w), nv = column(d.id(), &RigidityReport::neumann_p);
      // "Non-decreasing" read with the 10% refinement slack used for the disc sequences.
      const bool ok = *std::min_element(dv.begin(), dv.end()) >= 0.05 &&
                      *std::min_element(nv.begin(), nv.end()) >= 0.05 && non_decreasing(dv, 0.1) &&
                      non_decreasing(nv, 0.1);
      pass = pass && ok;
      detail += fmt("%s dev_w=[%s] neumann_p=[%s]  ", d.id().c_str(), join(dv).c_str(), join(nv).c_str());
    }
    const double secs = rig_seconds[kDisc.id()] + rig_seconds[kEllipse15.id()] + rig_seconds[kSquare.id()];
    report(6, pass, "rigidity dichotomy", detail, secs);
  }

  // 7. Harmonic orthogonality of the constrained-vorticity mode.
  t0 = Clock::now();
  {
    const auto levels = spectrum_levels(ProblemKind::ConstrainedVorticity, kDisc, kCoarse, 2, opts(1));
    const double o0 = levels[0].modes[0].orthogonality, o1 = levels[1].modes[0].orthogonality;
    report(7, o0 <= 1e-2 && o1 < o0, "harmonic orthogonality (degree <= 6)",
           fmt("h=0.05: %.2e  h=0.025: %.2e", o0, o1), seconds_since(t0));
  }

  // 8. Clamped vs merely vanishing stream functions on the disc.
  t0 = Clock::now();
  {
    auto morley = make_space(build_mesh(kDisc, kCoarse), SpaceKind::Morley);
    const FieldFunction clamped = interpolate(
        morley, [](Point p) { const double s = 1 - p.x * p.x - p.y * p.y; return s * s; },
        [](Point p) { const double s = 1 - p.x * p.x - p.y * p.y; return Point{-4 * p.x * s, -4 * p.y * s}; });
    const FieldFunction vanishing = interpolate(
        morley, [](Point p) { return 1 - p.x * p.x - p.y * p.y; }, [](Point p) { return Point{-2 * p.x, -2 * p.y}; });
    const double a = h20_membership_check(clamped), b = h20_membership_check(vanishing);
    report(8, a <= 0.02 && b >= 0.5, "H2_0 membership dichotomy",
           fmt("(1-r^2)^2: %.2e  1-r^2: %.3f", a, b), seconds_since(t0));
  }

  // 9. Decay of the first disc Stokes mode.
  t0 = Clock::now();
  const auto disc_s = two_levels(ProblemKind::Stokes, kDisc, 1);
  const double stokes_seconds = seconds_since(t0);
  {
    const Mode& m = disc_s.back().modes[0];
    bool pass = true;
    std::string detail = fmt("lambda1_S=%.5f  ", m.lambda);
    for (double nu : {0.5, 1.0}) {
      const double T = default_final_time(nu, m.lambda);
      const EvolutionTrace tr = stokes_heat_evolve(m.field, nu, default_step(T), T);
      const double err = rel(tr.decay_rate_fit, 2 * nu * m.lambda);
      const double margin = dissipation_check(tr, m.lambda, nu) / tr.energy.front();
      pass = pass && err <= 0.02 && tr.shape_deviation <= 0.01 && margin >= -1e-3;
      detail += fmt("nu=%.1f: rate err %.1e, shape %.1e, margin/E0 %.1e  ", nu, err, tr.shape_deviation, margin);
    }
    report(9, pass, "cellular decay", detail, seconds_since(t0));
  }

  // 10. Transport residual: stationary on the disc, not on the ellipse.
  t0 = Clock::now();
  {
    std::vector<double> disc, ell;
    for (const auto& r : disc_s) disc.push_back(transport_residual(r.modes[0].field, r.modes[0].vorticity));
    for (const auto& r : two_levels(ProblemKind::Stokes, kEllipse15, 1))
      ell.push_back(transport_residual(r.modes[0].field, r.modes[0].vorticity));
    // Stable: the disc value keeps falling, the ellipse value moves by < 10%.
    const bool pass = disc.back() <= 0.02 && disc.back() <= disc.front() && std::min(ell[0], ell[1]) >= 0.05 &&
                      rel(ell[1], ell[0]) < 0.1;
    report(10, pass, "transport residual", fmt("disc [%s]  ellipse(1.5,1) [%s]", join(disc).c_str(), join(ell).c_str()),
           seconds_since(t0) + stokes_seconds);
  }

  // 11. Byte-identical CLI output on repeat.
  t0 = Clock::now();
  {
    const fs::path dir = fs::temp_directory_path() / "cflow_acceptance_determinism";
    const std::vector<std::vector<std::string>> commands = {
        {"mesh", "--domain", "fourier", "--h", "0.1", "--levels", "2"},
        {"spectrum", "--domain", "ellipse", "--h", "0.15", "--levels", "2", "--k", "2"},
        {"rigidity", "--domain", "disc", "--h", "0.15", "--levels", "2"},
        {"evolve", "--domain", "disc", "--h", "0.15", "--nu", "0.5"},
        {"convergence", "--domain", "rectangle", "--h", "0.2", "--levels", "3", "--kind", "dirichlet,buckling"}};
    bool pass = true;
    int files = 0;
    for (auto args : commands) {
      fs::remove_all(dir);
      args.insert(args.end(), {"--out", dir.string(), "--jobs", "1", "--seed", "7"});
      const bool ran = run_cli_args(args) == 0;
      const auto first = snapshot(dir);
      fs::remove_all(dir);
      const bool again = run_cli_args(args) == 0;
      const auto second = snapshot(dir);
      pass = pass && ran && again && !first.empty() && first == second;
      files += static_cast<int>(first.size());
    }
    fs::remove_all(dir);
    report(11, pass, "determinism", fmt("%zu commands, %d files compared", commands.size(), files), seconds_since(t0));
  }

  // 12. Twist identity for smooth clamped fields.
  t0 = Clock::now();
  {
    bool pass = true;
    std::string detail;
    const std::vector<std::pair<std::function<double(Point)>, std::function<Point(Point)>>> fields = {
        {[](Point p) { const double s = 1 - p.x * p.x - p.y * p.y; return s * s; },
         [](Point p) { const double s = 1 - p.x * p.x - p.y * p.y; return Point{-4 * p.x * s, -4 * p.y * s}; }},
        {[](Point p) { const double s = 1 - p.x * p.x - p.y * p.y; return s * s * (1 + p.x + p.x * p.y); },
         [](Point p) {
           const double s = 1 - p.x * p.x - p.y * p.y, g = 1 + p.x + p.x * p.y;
           return Point{-4 * p.x * s * g + s * s * (1 + p.y), -4 * p.y * s * g + s * s * p.x};
         }}};
    for (const auto& [f, grad] : fields) {
      std::vector<double> ratio;
      for (const MeshPtr& mesh : mesh_hierarchy(kDisc, 0.1, 3))
        ratio.push_back(twist_ratio(interpolate(make_space(mesh, SpaceKind::Morley), f, grad)));
      const auto o = orders(ratio);
      const double worst = *std::min_element(o.begin(), o.end());
      pass = pass && worst >= 1.0;
      detail += fmt("[%s] order>=%.2f  ", join(ratio).c_str(), worst);
    }
    report(12, pass, "twist functional vanishes for clamped fields", detail, seconds_since(t0));
  }

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
