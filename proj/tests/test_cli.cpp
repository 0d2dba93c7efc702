#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cflow/cli.hpp"
#include "cflow/rigidity.hpp"

using namespace cflow;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "cflow");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cflow_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config JSON round trip") {
    ExperimentConfig c;
    c.command = "rigidity";
    c.domain = "ellipse";
    c.params = {1.2, 1.0};
    c.h = 0.07;
    c.levels = 3;
    c.sweep = true;
    c.kinds = {"buckling"};
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"colour", "red"}}), UsageError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"h", "fine"}}), UsageError);
  }

  TEST_CASE("validation reports usage errors") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.levels = 0;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = ExperimentConfig{};
    c.command = "convergence";
    c.levels = 2;
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = ExperimentConfig{};
    c.params = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(c.validate(), UsageError);
    c = ExperimentConfig{};
    c.kinds = {"plate"};
    CHECK_THROWS_AS(c.validate(), UsageError);
  }

  TEST_CASE("exit codes") {
    CHECK(run({"spectrum", "--domain", "hexagon"}) == 2);
    CHECK(run({"launch"}) == 2);
    CHECK(run({}) == 2);
    CHECK(run({"mesh", "--h", "-1"}) == 2);
    CHECK(run({"--help"}) == 0);
    std::string out;
    CHECK(run({"--version"}, &out) == 0);
    CHECK(out.find(version()) != std::string::npos);
    // Too coarse for the domain: rejected by the mesher at run time.
    const fs::path dir = scratch("coarse");
    CHECK(run({"mesh", "--h", "0.9", "--out", dir.string()}) == 1);
  }

  TEST_CASE("mesh command writes one JSON file per level with config and version") {
    const fs::path dir = scratch("mesh");
    std::string out;
    REQUIRE(run({"mesh", "--domain", "ellipse", "--params", "1.3,1", "--h", "0.2", "--levels", "2", "--out", dir.string()},
                &out) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "mesh_L1.json"));
    CHECK(j["version"] == version());
    CHECK(j["config"]["domain"] == "ellipse");
    CHECK(j["config"]["params"] == std::vector<double>{1.3, 1.0});
    CHECK(fs::exists(dir / "mesh_L0.json"));
  }

  TEST_CASE("flags override the config file") {
    const fs::path dir = scratch("override");
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << R"({"domain": "rectangle", "h": 0.25, "levels": 2, "out": ")" << (dir / "a").string() << "\"}";
    REQUIRE(run({"mesh", "--config", cfg.string(), "--levels", "1"}) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "a" / "mesh_L0.json"));
    CHECK(j["config"]["domain"] == "rectangle");
    CHECK(j["config"]["levels"] == 1);
    CHECK(!fs::exists(dir / "a" / "mesh_L1.json"));
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK(run({"mesh", "--config", (dir / "bad.json").string()}) == 2);
  }

  TEST_CASE("rigidity CSV format and repeat determinism") {
    const fs::path dir = scratch("rigidity");
    const std::vector<std::string> args = {"rigidity", "--domain", "disc", "--h", "0.2", "--out", dir.string()};
    REQUIRE(run(args) == 0);
    const std::string first = slurp(dir / "rigidity.csv");
    REQUIRE(run(args) == 0);
    CHECK(slurp(dir / "rigidity.csv") == first);
    std::istringstream lines(first);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# cflow ", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("# config {", 0) == 0);
    std::getline(lines, line);
    CHECK(line == RigidityReport::csv_header());
    std::getline(lines, line);
    CHECK(line.rfind("disc(1),", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
  }

  TEST_CASE("evolve writes trace and summary") {
    const fs::path dir = scratch("evolve");
    std::string out;
    REQUIRE(run({"evolve", "--h", "0.2", "--nu", "0.5", "--out", dir.string()}, &out) == 0);
    const auto s = nlohmann::json::parse(slurp(dir / "evolution_summary.json"));
    CHECK(s["steps"] == 60);
    CHECK(s["decay_rate_relative_error"].get<double>() < 0.02);
    CHECK(slurp(dir / "evolution.csv").find("t,E,divergence_residual\n0,") != std::string::npos);
    CHECK(run({"evolve", "--h", "0.2", "--dt", "0.5", "--T", "1", "--out", dir.string()}) == 2);
  }

  TEST_CASE("convergence table") {
    const fs::path dir = scratch("convergence");
    REQUIRE(run({"convergence", "--h", "0.2", "--levels", "3", "--kind", "dirichlet", "--out", dir.string()}) == 0);
    const std::string csv = slurp(dir / "convergence.csv");
    CHECK(csv.find("quantity,level,h,value,increment,observed_order\n") != std::string::npos);
    CHECK(csv.find("area_defect,2,") != std::string::npos);
    CHECK(csv.find("dirichlet_lambda1,2,") != std::string::npos);
  }
}
