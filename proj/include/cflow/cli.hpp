#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace cflow {

const char* version();

/// Thrown for invalid configurations; mapped to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string command = "spectrum";
  std::string domain = "disc";
  std::vector<double> params;  // empty: unit defaults for the domain kind
  double h = 0.05;
  int levels = 1;
  int k = 2;
  double tol = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 20240601;
  double nu = 1.0;
  double dt = 0.0;  // 0: T / 60
  double T = 0.0;   // 0: 3 / (2 nu lambda1)
  std::string out = "out";
  int jobs = 1;
  /// spectrum: problem kinds to solve.
  std::vector<std::string> kinds = {"dirichlet", "buckling", "stokes"};
  /// rigidity: sweep ellipse aspect ratios 1.0, 1.1, ..., 1.5 instead of
  /// the single configured domain.
  bool sweep = false;

  /// Throws UsageError on out-of-range values or unknown names.
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

/// Each command writes its files under config.out and a short summary to
/// `log`. Return value is the exit code (0 ok, 1 numerical failure).
int cmd_spectrum(const ExperimentConfig& config, std::ostream& log);
int cmd_rigidity(const ExperimentConfig& config, std::ostream& log);
int cmd_evolve(const ExperimentConfig& config, std::ostream& log);
int cmd_convergence(const ExperimentConfig& config, std::ostream& log);
int cmd_mesh(const ExperimentConfig& config, std::ostream& log);

/// Full command-line entry point (argv[1] is the command).
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cflow
