#include <doctest.h>

#include "cht/config.hpp"
#include "support.hpp"

using namespace cht;
using namespace cht::testing;

namespace {

const char* kFull = R"(# comment
[model]
R = 2
gamma = 1.5
alpha = 0.5
ubar = 0.4      ; trailing comment
T = 0.3
L1 = 4
L2 = 3
L3 = 2
H0 = 1.2
H1 = 0.1
H2 = -0.2

[simulate]
dt = 0.25
scheme = imex2
model = taylor
grid = 16, 12, 8
dealias = false
stabilization = 0.5
diffusive_stabilization = 0.1
t_end = 30
record_every = 3
steady_tol = 1e-9
init = modes
modes = 1,0,0:0.05 0,1,0:-0.02

[reduce]
y0 = 0.1
dt = 0.02
t_end = 10
record_every = 5
sigma_at = critical

[sweep]
temperatures = 0.1, 0.2
threads = 2

[validate]
y0 = 0.03
horizon = 12
dt = 0.2

[output]
dir = results
seed = 99
)";

const std::string kModel = "[model]\nR = 1\ngamma = 1\nalpha = 1\n";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("a full configuration parses") {
  const RunConfig c = parse_config(kFull);
  CHECK(c.physical.R == 2);
  CHECK(c.physical.gamma == 1.5);
  CHECK(c.physical.alpha == 0.5);
  CHECK(c.physical.ubar == 0.4);
  CHECK(c.T == 0.3);
  CHECK(c.temperature() == 0.3);
  CHECK(c.domain.lengths() == std::array<double, 3>{4, 3, 2});
  CHECK(c.physical.mobility.h0 == 1.2);
  CHECK(c.physical.mobility.h2 == -0.2);
  CHECK_FALSE(c.physical.mobility.profile.has_value());

  const SimulateBlock& s = c.simulate;
  CHECK(s.step.dt == 0.25);
  CHECK(s.step.scheme == Scheme::IMEX2);
  CHECK(s.step.model == RhsModel::Taylor);
  CHECK(s.step.grid == GridShape{16, 12, 8});
  CHECK_FALSE(s.step.dealias);
  CHECK(s.step.stabilization == 0.5);
  CHECK(s.step.diffusive_stabilization == 0.1);
  CHECK(s.options.t_end == 30);
  CHECK(s.options.record_every == 3);
  CHECK(s.options.steady_tol == 1e-9);
  CHECK(s.init == InitKind::Modes);
  REQUIRE(s.modes.size() == 2);
  CHECK(s.modes[1].first == ModeIndex{0, 1, 0});
  CHECK(s.modes[1].second == -0.02);

  CHECK(c.reduce.y0 == std::vector<double>{0.1});
  CHECK(c.reduce.options.dt == 0.02);
  CHECK(c.reduce.options.sigma_at == SigmaAt::Critical);
  CHECK(c.sweep.temperatures == std::vector<double>{0.1, 0.2});
  CHECK(c.sweep.threads == 2);
  CHECK(c.validate.horizon == 12);
  CHECK(c.validate.dt == 0.2);
  CHECK(c.output_dir == "results");
  CHECK(c.seed == 99);
}

TEST_CASE("defaults for optional keys") {
  const RunConfig c = parse_config(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\n");
  CHECK(c.physical.R == 1);
  CHECK(c.physical.mobility.h0 == 1);
  CHECK_FALSE(c.T.has_value());
  CHECK(c.simulate.step.grid == GridShape{32, 32, 32});
  CHECK(c.sweep.epsilons.size() == 8);
  CHECK(c.seed == 1);
  CHECK_THROWS_AS(c.temperature(), ConfigError);
}

TEST_CASE("grid with a single value is cubic") {
  const RunConfig c =
      parse_config(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\n[simulate]\ngrid = 12\n");
  CHECK(c.simulate.step.grid == GridShape{12, 12, 12});
}

TEST_CASE("mobility profiles set the Taylor data") {
  const RunConfig c = parse_config(
      kModel + "ubar = 0.4\nL1 = 3\nL2 = 2\nL3 = 1\nprofile = poly:0.5, 1, 1\nprofile_min = 0.4\n");
  REQUIRE(c.physical.mobility.profile.has_value());
  CHECK(c.physical.mobility.h0 == doctest::Approx(0.5 + 0.4 + 0.16));
  CHECK(c.physical.mobility.h1 == doctest::Approx(1.8));
  CHECK(c.physical.mobility.h2 == doctest::Approx(2.0));
  CHECK(c.physical.mobility.profile->lower_bound() == 0.4);

  const MobilityProfile t = parse_profile("table:0:1, 1:3");
  CHECK(t.kind() == MobilityProfile::Kind::Table);
  CHECK(t(0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_profile("spline:1,2"), ModelError);
  CHECK_THROWS_AS(parse_profile("table:0:1,0.5"), ModelError);
}

TEST_CASE("errors name the offending line") {
  CHECK(error_line(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\nfoo = 2\n") == 9);
  CHECK(error_line(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\n[nonsense]\n") == 9);
  CHECK(error_line(kModel + "ubar = abc\nL1 = 3\nL2 = 2\nL3 = 1\n") == 5);
  CHECK(error_line(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\nno equals sign\n") == 9);
  CHECK(error_line("ubar = 0.3\n") == 1);
  CHECK(error_line(kModel + "ubar = 0.3\nubar = 0.4\nL1 = 3\nL2 = 2\nL3 = 1\n") == 6);
  CHECK(error_line(
            kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\n[simulate]\nscheme = rk4\n") == 10);
  CHECK(error_line(kModel + "ubar = 0.3\nL1 = 3\nL2 = 2\nL3 = 1\n[simulate]\nmodes = 1,0:0.1\n") ==
        10);
}

TEST_CASE("missing required keys are reported at their section") {
  const std::string msg = error_text("# x\n" + kModel + "L1 = 3\nL2 = 2\nL3 = 1\n");
  CHECK(msg.find("missing required key 'ubar' in [model]") != std::string::npos);
  CHECK(msg.rfind("line 2:", 0) == 0);
  CHECK(error_text("").find("[model]") != std::string::npos);
}

TEST_CASE("inconsistent models are configuration errors") {
  // Profile together with explicit Taylor data.
  CHECK(error_line(kModel + "ubar = 0.4\nL1 = 3\nL2 = 2\nL3 = 1\nH0 = 1\nprofile = poly:1\n") > 0);
  // Edges out of order.
  CHECK_THROWS_AS(parse_config(kModel + "ubar = 0.3\nL1 = 1\nL2 = 2\nL3 = 3\n"), ConfigError);
  // Mean fraction outside (0, 1).
  CHECK_THROWS_AS(parse_config(kModel + "ubar = 1.3\nL1 = 3\nL2 = 2\nL3 = 1\n"), ConfigError);
}

TEST_CASE("configurations shipped with the tool load") {
  for (const char* name : {"symmetric.ini", "cube_offcritical.ini", "square_profile.ini"}) {
    INFO(name);
    CHECK_NOTHROW(load_config(std::filesystem::path(CHT_CONFIG_DIR) / name));
  }
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
}
