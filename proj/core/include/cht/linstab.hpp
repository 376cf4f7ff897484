#pragma once

// Linearised spectrum about the homogeneous state and the principle of
// exchange of stabilities.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cht/params.hpp"
#include "cht/spectral.hpp"

namespace cht {

class AmbiguousDomain : public ModelError {
public:
  using ModelError::ModelError;
};

struct GrowthRate {
  ModeIndex K;
  double beta = 0.0;
};

struct CriticalSet {
  std::vector<ModeIndex> modes;
  int m() const { return static_cast<int>(modes.size()); }
};

/// beta_K(T) = H(ubar) rho_K (2 gamma - R T / (ubar (1 - ubar)) - alpha rho_K).
double growth_rate(const ModeIndex& K, double T, const PhysicalParams& p,
                   const DomainSpec& d);

/// Modes with beta_K(Tc) = 0 for the domain case. Throws AmbiguousDomain
/// when a mode outside the set is critical to within round-off, i.e. the
/// box is degenerate beyond what its tie tolerance resolved.
CriticalSet critical_set(const PhysicalParams& p, const DomainSpec& d);

/// All modes with 0 <= k_i <= k_max, excluding zero.
std::vector<ModeIndex> scan_modes(int k_max);

struct PesScan {
  int k_max = 8;
  std::vector<double> temperatures;  ///< should bracket Tc; empty: Tc*(1 +- 1e-2)
};

struct PesViolation {
  ModeIndex K;
  double T = 0.0;
  double beta = 0.0;
  std::string reason;
};

struct PesReport {
  double Tc = 0.0;
  std::vector<ModeIndex> critical_modes;
  double margin = 0.0;              ///< min_{K not in P} |beta_K(Tc)|
  ModeIndex margin_mode;
  bool tail_certified = false;      ///< every k_i > k_max has alpha rho_K > 2 gamma
  std::vector<PesViolation> violations;
  bool passed() const { return violations.empty(); }
};

PesReport verify_pes(const PhysicalParams& p, const DomainSpec& d,
                     const PesScan& scan = {});

/// Root of T -> max_{k_i <= k_max} beta_K(T) by bisection, down to adjacent doubles.
/// Independent of the closed-form critical temperature.
double critical_temperature_bisect(const PhysicalParams& p, const DomainSpec& d,
                                   std::optional<std::pair<double, double>> bracket = {},
                                   int k_max = 8);

}  // namespace cht
