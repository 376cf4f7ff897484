#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cht/manifold.hpp"
#include "cht/params.hpp"

namespace cht {

/// The deciding discriminant is within 1e-12 b3 of zero: the cubic
/// truncation cannot decide the transition.
class MarginalTransition : public ModelError {
public:
  using ModelError::ModelError;
};

enum class TransitionType { TypeI, TypeII };
enum class BifurcationSide { Below, Above, Both };

std::string_view to_string(TransitionType t);
std::string_view to_string(BifurcationSide s);

/// Bifurcated equilibria of the reduced system, counted across both sides.
struct Census {
  bool enumerated = true;   ///< false when sigma1 = sigma2 leaves a continuum
  int total = 0;
  int below = 0;            ///< on T < Tc
  int above = 0;            ///< on T > Tc
  int attractors = 0;       ///< minimal attractors (Type-I)
  int saddles = 0;          ///< full-system view
  int reduced_repellers = 0;  ///< those saddles with no stable reduced direction
};

struct TransitionReport {
  static constexpr int kSchemaVersion = 1;

  double Tc = 0.0;
  int m = 1;
  DomainCase domain_case = DomainCase::Distinct;
  Coefficients at_Tc;
  double B1 = 0.0, B2 = 0.0, B3 = 0.0;
  double sigma1 = 0.0, sigma2 = 0.0;  ///< at Tc
  TransitionType type = TransitionType::TypeI;
  BifurcationSide side = BifurcationSide::Below;
  Census census;
  /// y* = c sqrt|Tc - T| for m = 1.
  std::optional<double> amplitude_law;
  /// Sphere label S^{m-1} of the bifurcated attractor (Type-I).
  std::optional<std::string> attractor_topology;
  std::optional<int> minimal_attractors;
  std::vector<std::string> notes;
};

TransitionReport classify_transition(const PhysicalParams& p, const DomainSpec& d);

/// sqrt(4 R |Tc - T| / (3 |B1| ubar (1 - ubar))) for m = 1 on the bifurcated side.
double bifurcated_amplitude(const PhysicalParams& p, const DomainSpec& d, double T);

struct CensusCheck {
  Census expected;
  Census observed;
  double T_below = 0.0;
  double T_above = 0.0;
  std::vector<std::string> mismatches;
  bool matches() const { return mismatches.empty(); }
};

/// Re-derive the census from enumerate_equilibria at Tc (1 -+ rel_offset),
/// with sigma frozen at Tc, and compare against the report.
CensusCheck census_check(const TransitionReport& report, const PhysicalParams& p,
                         const DomainSpec& d, double rel_offset = 1e-3);

nlohmann::json to_json(const TransitionReport& r);
nlohmann::json to_json(const Census& c);
std::string render_text(const TransitionReport& r);

}  // namespace cht
