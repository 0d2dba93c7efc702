#include "cflow/cli.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cflow/evolution.hpp"
#include "cflow/format.hpp"
#include "cflow/linalg.hpp"
#include "cflow/rigidity.hpp"
#include "cflow/spectra.hpp"

#ifndef CFLOW_VERSION
#define CFLOW_VERSION "0.0.0"
#endif

namespace cflow {

const char* version() { return CFLOW_VERSION; }

namespace {

const std::set<std::string> kCommands = {"spectrum", "rigidity", "evolve", "convergence", "mesh"};
const std::set<std::string> kDomains = {"disc", "ellipse", "rectangle", "fourier"};

DomainSpec domain_of(const ExperimentConfig& c) {
  try {
    return DomainSpec::parse(c.domain, c.params);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

SpectrumOptions options_of(const ExperimentConfig& c, int k) {
  SpectrumOptions o;
  o.k = k;
  o.tol = c.tol;
  o.max_iterations = c.max_iterations;
  o.seed = c.seed;
  // Across-run parallelism replaces the in-kernel threads.
  o.exec = c.jobs > 1 ? Execution::Serial : Execution::Parallel;
  return o;
}

std::filesystem::path out_dir(const ExperimentConfig& c) {
  std::filesystem::create_directories(c.out);
  return c.out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, nlohmann::json j, const ExperimentConfig& c) {
  j["config"] = c.to_json();
  j["version"] = version();
  write_file(path, j.dump(2) + "\n");
}

// CSV files carry the version and resolved config as leading '#' lines.
std::string csv_preamble(const ExperimentConfig& c) {
  return std::string("# cflow ") + version() + "\n# config " + c.to_json().dump() + "\n";
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers finish.
void run_indexed(int n, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, n); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kCommands.count(command)) throw UsageError("unknown command '" + command + "'");
  if (!kDomains.count(domain)) throw UsageError("unknown domain '" + domain + "' (expected disc|ellipse|rectangle|fourier)");
  domain_of(*this);
  if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("--h must be positive");
  if (levels < 1) throw UsageError("--levels must be >= 1");
  if (command == "convergence" && levels < 3) throw UsageError("convergence needs --levels >= 3");
  if (k < 1) throw UsageError("--k must be >= 1");
  if (!(tol > 0.0)) throw UsageError("--tol must be positive");
  if (max_iterations < 1) throw UsageError("--max-iter must be >= 1");
  if (!(nu > 0.0)) throw UsageError("--nu must be positive");
  if (dt < 0.0 || T < 0.0) throw UsageError("--dt and --T must be non-negative");
  if (dt > 0.0 && T > 0.0 && dt > T / 10.0) throw UsageError("--dt must not exceed T/10");
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  if (out.empty()) throw UsageError("--out must not be empty");
  if (kinds.empty()) throw UsageError("--kind needs at least one problem kind");
  for (const auto& name : kinds) {
    try {
      parse_problem_kind(name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"command", command}, {"domain", domain}, {"params", params},   {"h", h},
          {"levels", levels},   {"k", k},           {"tol", tol},         {"max_iterations", max_iterations},
          {"seed", seed},       {"nu", nu},         {"dt", dt},           {"T", T},
          {"out", out},         {"jobs", jobs},     {"kinds", kinds},     {"sweep", sweep}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") c.command = value.get<std::string>();
      else if (key == "domain") c.domain = value.get<std::string>();
      else if (key == "params") c.params = value.get<std::vector<double>>();
      else if (key == "h") c.h = value.get<double>();
      else if (key == "levels") c.levels = value.get<int>();
      else if (key == "k") c.k = value.get<int>();
      else if (key == "tol") c.tol = value.get<double>();
      else if (key == "max_iterations") c.max_iterations = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "nu") c.nu = value.get<double>();
      else if (key == "dt") c.dt = value.get<double>();
      else if (key == "T") c.T = value.get<double>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "jobs") c.jobs = value.get<int>();
      else if (key == "kinds") c.kinds = value.get<std::vector<std::string>>();
      else if (key == "sweep") c.sweep = value.get<bool>();
      else if (key == "version") continue;
      else throw UsageError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return c;
}

int cmd_spectrum(const ExperimentConfig& c, std::ostream& log) {
  const DomainSpec spec = domain_of(c);
  std::vector<ProblemKind> kinds;
  for (const auto& name : c.kinds) kinds.push_back(parse_problem_kind(name));
  std::vector<std::vector<SpectrumResult>> results(kinds.size());
  run_indexed(static_cast<int>(kinds.size()), c.jobs, [&](int i) {
    // Two Dirichlet modes are always needed for the Weinstein comparison.
    const int k = kinds[i] == ProblemKind::Dirichlet ? std::max(c.k, 2) : c.k;
    results[i] = spectrum_levels(kinds[i], spec, c.h, c.levels, options_of(c, k));
  });
  const auto dir = out_dir(c);
  for (std::size_t i = 0; i < kinds.size(); ++i)
    for (std::size_t l = 0; l < results[i].size(); ++l)
      write_json(dir / ("spectrum_" + to_string(kinds[i]) + "_L" + std::to_string(l) + ".json"),
                 results[i][l].to_json(), c);

  // Best available estimate: extrapolated on the finest level if present.
  auto best = [&](ProblemKind kind, std::size_t index) -> double {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (kinds[i] != kind) continue;
      const SpectrumResult& r = results[i].back();
      if (index < r.extrapolated.size()) return r.extrapolated[index];
      if (index < r.modes.size()) return r.modes[index].lambda;
    }
    return NAN;
  };
  const double d1 = best(ProblemKind::Dirichlet, 0), d2 = best(ProblemKind::Dirichlet, 1);
  const double b1 = best(ProblemKind::Buckling, 0), s1 = best(ProblemKind::Stokes, 0);
  log << "domain " << spec.id() << "  h " << fixed(results.front().back().h(), 4) << "  levels " << c.levels << "\n";
  log << "  lambda1_D  " << fixed(d1, 8) << "\n";
  log << "  lambda2_D  " << fixed(d2, 8) << "\n";
  log << "  lambda1_B  " << fixed(b1, 8) << "\n";
  log << "  lambda1_S  " << fixed(s1, 8) << "\n";
  log << "  weinstein gap (lambda1_B - lambda2_D)/lambda2_D  " << fixed((b1 - d2) / d2, 4) << "\n";
  return 0;
}

int cmd_rigidity(const ExperimentConfig& c, std::ostream& log) {
  std::vector<DomainSpec> domains;
  if (c.sweep) {
    for (int i = 0; i <= 5; ++i) domains.push_back(DomainSpec::ellipse(1.0 + 0.1 * i, 1.0));
  } else {
    domains.push_back(domain_of(c));
  }
  std::vector<std::vector<RigidityReport>> reports(domains.size());
  run_indexed(static_cast<int>(domains.size()), c.jobs,
              [&](int i) { reports[i] = rigidity_levels(domains[i], c.h, c.levels, options_of(c, 1)); });
  std::string csv = csv_preamble(c) + RigidityReport::csv_header() + "\n";
  nlohmann::json rows = nlohmann::json::array();
  log << RigidityReport::csv_header() << "\n";
  for (const auto& level : reports)
    for (const auto& r : level) {
      csv += r.csv_row() + "\n";
      rows.push_back(r.to_json());
      log << r.csv_row() << "\n";
    }
  const auto dir = out_dir(c);
  write_file(dir / "rigidity.csv", csv);
  write_json(dir / "rigidity.json", {{"reports", rows}}, c);
  return 0;
}

int cmd_evolve(const ExperimentConfig& c, std::ostream& log) {
  const DomainSpec spec = domain_of(c);
  const MeshPtr mesh = mesh_hierarchy(spec, c.h, c.levels).back();
  const SpectrumResult stokes = stokes_spectrum(mesh, options_of(c, 1));
  const Mode& mode = stokes.modes.front();
  const double T = c.T > 0.0 ? c.T : default_final_time(c.nu, mode.lambda);
  const double dt = c.dt > 0.0 ? c.dt : default_step(T);
  if (dt > T / 10.0) throw UsageError("--dt must not exceed T/10");
  const EvolutionTrace trace = stokes_heat_evolve(mode.field, c.nu, dt, T);
  const double margin = dissipation_check(trace, mode.lambda, c.nu);
  const double transport = transport_residual(mode.field, mode.vorticity);
  nlohmann::json summary = summary_json(trace, mode.lambda, margin, transport);
  summary["domain"] = spec.to_json();
  summary["domain_id"] = spec.id();
  summary["h"] = mesh->h();
  summary["transport_flagged"] = transport >= 0.05;
  const auto dir = out_dir(c);
  write_file(dir / "evolution.csv", csv_preamble(c) + trace.to_csv());
  write_json(dir / "evolution_summary.json", summary, c);
  log << "domain " << spec.id() << "  h " << fixed(mesh->h(), 4) << "  lambda1_S " << fixed(mode.lambda, 8) << "\n";
  log << "  decay rate " << fixed(trace.decay_rate_fit, 8) << " (expected " << fixed(2.0 * c.nu * mode.lambda, 8)
      << ", rel. error " << fixed(summary["decay_rate_relative_error"].get<double>(), 3) << ")\n";
  log << "  shape deviation " << fixed(trace.shape_deviation, 3) << "  dissipation margin/E0 "
      << fixed(summary["dissipation_margin_relative"].get<double>(), 3) << "\n";
  log << "  transport residual " << fixed(transport, 4) << (transport >= 0.05 ? "  [flagged: not stationary]" : "")
      << "\n";
  return 0;
}

int cmd_convergence(const ExperimentConfig& c, std::ostream& log) {
  const DomainSpec spec = domain_of(c);
  struct Series {
    std::string name;
    std::vector<double> h, value;
    bool is_error = false;  // value is already an error (orders from ratios)
  };
  std::vector<Series> series;
  {
    Series area{"area_defect", {}, {}, true};
    for (const MeshPtr& m : mesh_hierarchy(spec, c.h, c.levels)) {
      area.h.push_back(m->h());
      area.value.push_back(spec.area() - m->total_area());
    }
    series.push_back(std::move(area));
  }
  std::vector<ProblemKind> kinds;
  for (const auto& name : c.kinds) {
    const ProblemKind kind = parse_problem_kind(name);
    if (kind != ProblemKind::ConstrainedVorticity) kinds.push_back(kind);
  }
  std::vector<Series> eig(kinds.size());
  run_indexed(static_cast<int>(kinds.size()), c.jobs, [&](int i) {
    eig[i].name = to_string(kinds[i]) + "_lambda1";
    for (const auto& r : spectrum_levels(kinds[i], spec, c.h, c.levels, options_of(c, 1))) {
      eig[i].h.push_back(r.h());
      eig[i].value.push_back(r.modes.front().lambda);
    }
  });
  for (auto& s : eig) series.push_back(std::move(s));

  std::string csv = csv_preamble(c) + "quantity,level,h,value,increment,observed_order\n";
  log << "quantity            level  h        value              order\n";
  for (const auto& s : series) {
    for (std::size_t l = 0; l < s.value.size(); ++l) {
      double increment = NAN, order = NAN;
      if (s.is_error) {
        increment = s.value[l];
        if (l >= 1) order = std::log2(std::abs(s.value[l - 1] / s.value[l]));
      } else {
        if (l >= 1) increment = s.value[l] - s.value[l - 1];
        if (l >= 2) order = std::log2(std::abs((s.value[l - 1] - s.value[l - 2]) / (s.value[l] - s.value[l - 1])));
      }
      csv += s.name + "," + std::to_string(l) + "," + format_double(s.h[l]) + "," + format_double(s.value[l]) + "," +
             format_double(increment) + "," + format_double(order) + "\n";
      std::ostringstream row;
      row << std::left << std::setw(20) << s.name << std::setw(7) << l << std::setw(9) << fixed(s.h[l], 4)
          << std::setw(19) << fixed(s.value[l], 12) << (std::isnan(order) ? std::string("-") : fixed(order, 3));
      log << row.str() << "\n";
    }
  }
  write_file(out_dir(c) / "convergence.csv", csv);
  return 0;
}

int cmd_mesh(const ExperimentConfig& c, std::ostream& log) {
  const DomainSpec spec = domain_of(c);
  const auto dir = out_dir(c);
  int level = 0;
  for (const MeshPtr& m : mesh_hierarchy(spec, c.h, c.levels)) {
    write_json(dir / ("mesh_L" + std::to_string(level) + ".json"), m->to_json(), c);
    log << "level " << level << "  vertices " << m->vertex_count() << "  triangles " << m->triangle_count() << "  h "
        << fixed(m->h(), 4) << "  area defect " << fixed(spec.area() - m->total_area(), 4) << "\n";
    ++level;
  }
  return 0;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-element spectra of buckling, Stokes and Dirichlet problems", "cflow"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", version());
  ExperimentConfig flags;
  std::string config_file;
  app.add_option("command", flags.command, "spectrum | rigidity | evolve | convergence | mesh")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_file, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides;
  auto bind = [&](CLI::Option* opt, std::function<void(ExperimentConfig&)> apply) {
    overrides.emplace_back(opt, std::move(apply));
  };
  bind(app.add_option("--domain", flags.domain, "disc | ellipse | rectangle | fourier")->check(CLI::IsMember(kDomains)),
       [&](ExperimentConfig& c) { c.domain = flags.domain; });
  bind(app.add_option("--params", flags.params, "domain parameters a,b,...")->delimiter(','),
       [&](ExperimentConfig& c) { c.params = flags.params; });
  bind(app.add_option("--h", flags.h, "target mesh size"), [&](ExperimentConfig& c) { c.h = flags.h; });
  bind(app.add_option("--levels", flags.levels, "number of mesh levels"),
       [&](ExperimentConfig& c) { c.levels = flags.levels; });
  bind(app.add_option("--k", flags.k, "eigenpairs per problem"), [&](ExperimentConfig& c) { c.k = flags.k; });
  bind(app.add_option("--tol", flags.tol, "eigen residual tolerance"), [&](ExperimentConfig& c) { c.tol = flags.tol; });
  bind(app.add_option("--max-iter", flags.max_iterations, "eigensolver iteration cap"),
       [&](ExperimentConfig& c) { c.max_iterations = flags.max_iterations; });
  bind(app.add_option("--seed", flags.seed, "start-block seed"), [&](ExperimentConfig& c) { c.seed = flags.seed; });
  bind(app.add_option("--nu", flags.nu, "viscosity"), [&](ExperimentConfig& c) { c.nu = flags.nu; });
  bind(app.add_option("--dt", flags.dt, "time step (default T/60)"), [&](ExperimentConfig& c) { c.dt = flags.dt; });
  bind(app.add_option("--T", flags.T, "final time (default 3/(2 nu lambda1))"),
       [&](ExperimentConfig& c) { c.T = flags.T; });
  bind(app.add_option("--out", flags.out, "output directory"), [&](ExperimentConfig& c) { c.out = flags.out; });
  bind(app.add_option("--jobs", flags.jobs, "concurrent runs"), [&](ExperimentConfig& c) { c.jobs = flags.jobs; });
  bind(app.add_option("--kind", flags.kinds, "dirichlet,buckling,stokes,constrained")->delimiter(','),
       [&](ExperimentConfig& c) { c.kinds = flags.kinds; });
  bind(app.add_flag("--sweep", flags.sweep, "rigidity: ellipse aspect ratios 1.0..1.5"),
       [&](ExperimentConfig& c) { c.sweep = flags.sweep; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig config;
  try {
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config file: ") + e.what());
      }
      config = ExperimentConfig::from_json(j);
    }
    config.command = flags.command;
    for (auto& [opt, apply] : overrides)
      if (opt->count() > 0) apply(config);
    config.validate();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (config.command == "spectrum") return cmd_spectrum(config, out);
    if (config.command == "rigidity") return cmd_rigidity(config, out);
    if (config.command == "evolve") return cmd_evolve(config, out);
    if (config.command == "convergence") return cmd_convergence(config, out);
    return cmd_mesh(config, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cflow
