#pragma once

// Run configuration: flat `key = value` lines grouped in [sections], with
// `#` or `;` comments. Unknown sections and keys are rejected, and every
// error names the line it came from.
//
//   [model]     R gamma alpha ubar T L1 L2 L3 case tie_tolerance
//               H0 H1 H2 profile profile_min
//   [simulate]  dt scheme model grid dealias stabilization
//               diffusive_stabilization t_end record_every steady_tol
//               init amplitude band modes snapshots
//   [reduce]    y0 dt t_end record_every sigma_at
//   [sweep]     epsilons temperatures threads
//   [validate]  y0 horizon dt
//   [output]    dir seed
//
// `profile` is "poly:c0,c1,..." (H(s) = c0 + c1 s + ...) or
// "table:s0:h0,s1:h1,..." (piecewise linear). When a profile is given,
// H0..H2 default to its Taylor data at ubar.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cht/manifold.hpp"
#include "cht/params.hpp"
#include "cht/simulator.hpp"

namespace cht {

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

enum class InitKind { Random, Modes };

struct SimulateBlock {
  StepConfig step;
  SimulateOptions options;
  InitKind init = InitKind::Random;
  double amplitude = 1e-3;
  int band = 4;
  std::vector<std::pair<ModeIndex, double>> modes;
};

struct ReduceBlock {
  std::vector<double> y0;
  ReducedIntegrationOptions options;
};

struct SweepBlock {
  /// Relative offsets: T = Tc (1 - eps).
  std::vector<double> epsilons{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
  /// Absolute temperatures; used instead of epsilons when given.
  std::vector<double> temperatures;
  int threads = 0;  ///< 0: hardware concurrency
};

struct ValidateBlock {
  std::vector<double> y0;
  /// Comparison window; one relaxation time 1/|beta| when absent.
  std::optional<double> horizon;
  double dt = 0.05;
};

struct RunConfig {
  PhysicalParams physical;
  DomainSpec domain{{1.0, 1.0, 1.0}};
  std::optional<double> T;
  SimulateBlock simulate;
  ReduceBlock reduce;
  SweepBlock sweep;
  ValidateBlock validate;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  /// Temperature for commands that need one.
  double temperature() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// "poly:..." or "table:..." as described above.
MobilityProfile parse_profile(const std::string& spec, double lower_bound = 0.0);

}  // namespace cht
