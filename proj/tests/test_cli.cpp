#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cht_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cht");
  std::ostringstream out, err;
  const int code = cht::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmall = R"([model]
R = 1
gamma = 1
alpha = 1
ubar = 0.5
T = 0.24
L1 = 3.141592653589793
L2 = 2
L3 = 1

[simulate]
dt = 1
grid = 8
t_end = 40
record_every = 5
amplitude = 0.001
band = 3

[reduce]
dt = 0.1
t_end = 5
record_every = 10

[sweep]
epsilons = 0.02, 0.04
threads = 2

[validate]
horizon = 5
dt = 0.1
)";

}  // namespace

TEST_CASE("classify writes a versioned report") {
  const fs::path dir = scratch("classify");
  const Run r = run({"classify", "--config", std::string(CHT_CONFIG_DIR) + "/symmetric.ini",
                     "--out", dir.string()});
  CHECK(r.code == cht::cli::kOk);
  CHECK(r.out.find("Type-I") != std::string::npos);
  const json j = read_json(dir / "report.json");
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "classify");
  CHECK(j["report"]["m"] == 1);
  CHECK(j["census_check"]["matches"] == true);
  CHECK(read_json(dir / "pes.json")["passed"] == true);
  CHECK(fs::exists(dir / "report.txt"));
}

TEST_CASE("the cube example classifies with eight minimal attractors") {
  const fs::path dir = scratch("cube");
  const Run r = run({"classify", "--config", std::string(CHT_CONFIG_DIR) + "/cube_offcritical.ini",
                     "--out", dir.string(), "--quiet"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json j = read_json(dir / "report.json");
  CHECK(j["report"]["m"] == 3);
  CHECK(j["report"]["minimal_attractors"] == 8);
}

TEST_CASE("configuration problems exit with code 2") {
  const fs::path dir = scratch("errors");
  const fs::path missing = write_file(dir, "missing.ini", "[model]\nR = 1\ngamma = 1\nalpha = 1\n");
  Run r = run({"classify", "--config", missing.string()});
  CHECK(r.code == cht::cli::kConfigError);
  CHECK(r.err.find("ubar") != std::string::npos);
  CHECK(r.err.find("line 1") != std::string::npos);

  const fs::path unknown = write_file(dir, "unknown.ini", std::string(kSmall) + "[output]\ncolour = red\n");
  r = run({"simulate", "--config", unknown.string()});
  CHECK(r.code == cht::cli::kConfigError);
  CHECK(r.err.find("colour") != std::string::npos);

  CHECK(run({}).code == cht::cli::kConfigError);
  CHECK(run({"frobnicate"}).code == cht::cli::kConfigError);
  CHECK(run({"classify"}).code == cht::cli::kConfigError);
  CHECK(run({"classify", "--config", (dir / "absent.ini").string()}).code == cht::cli::kConfigError);
}

TEST_CASE("model preconditions are numeric failures") {
  const fs::path dir = scratch("model");
  // 2 gamma below alpha pi^2 / L^2: no supercritical regime.
  std::string text = kSmall;
  text.replace(text.find("gamma = 1"), 9, "gamma = 0.1");
  const fs::path cfg = write_file(dir, "small.ini", text);
  const Run r = run({"classify", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == cht::cli::kNumericFailure);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = write_file(dir, "small.ini", kSmall);
  for (const char* sub : {"a", "b"})
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / sub).string(), "--seed", "5",
                 "--quiet"})
                .code == 0);
  REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (dir / "c").string(), "--seed", "6",
               "--quiet"})
              .code == 0);
  const std::string a = read_file(dir / "a" / "trajectory.csv");
  CHECK(a == read_file(dir / "b" / "trajectory.csv"));
  CHECK(a != read_file(dir / "c" / "trajectory.csv"));
  CHECK(a.rfind("t,mass,energy,dissipation,y_1_0_0\n", 0) == 0);
  const json s = read_json(dir / "a" / "summary.json");
  CHECK(s["seed"] == 5);
  CHECK(s["energy_monotone"] == true);
  CHECK(s["max_abs_mass"].get<double>() < 1e-14);
}

TEST_CASE("reduce from the origin stays there") {
  const fs::path dir = scratch("reduce");
  const fs::path cfg = write_file(dir, "small.ini", kSmall);
  REQUIRE(run({"reduce", "--config", cfg.string(), "--out", dir.string(), "--quiet"}).code == 0);
  const json j = read_json(dir / "reduce.json");
  CHECK(j["final"] == json::array({0.0}));
  CHECK(j["equilibria"].size() == 2);
  std::istringstream csv(read_file(dir / "reduced.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,y_1_0_0");
  while (std::getline(csv, line)) CHECK(line.substr(line.find(',') + 1) == "0");
}

TEST_CASE("sweep is consistent with the classifier") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_file(dir, "small.ini", kSmall);
  REQUIRE(run({"sweep", "--config", cfg.string(), "--out", dir.string(), "--quiet"}).code == 0);
  const json j = read_json(dir / "sweep.json");
  CHECK(j["consistent_with_classifier"] == true);
  CHECK(j["points"].size() == 2);
  CHECK(read_file(dir / "sweep.csv").rfind("T,epsilon,amplitude,predicted,grew,consistent", 0) == 0);
}

TEST_CASE("validate compares the PDE with the reduced system") {
  const fs::path dir = scratch("validate");
  const fs::path cfg = write_file(dir, "small.ini", kSmall);
  REQUIRE(run({"validate", "--config", cfg.string(), "--out", dir.string(), "--quiet"}).code == 0);
  const json j = read_json(dir / "validate.json");
  CHECK(j["y0"] == json::array({0.05}));
  CHECK(j["relative_deviation"].get<double>() < 0.05);
  CHECK(fs::exists(dir / "validate.csv"));
}
