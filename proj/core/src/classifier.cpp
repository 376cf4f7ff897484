#include "cht/classifier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cht/linstab.hpp"

namespace cht {

std::string_view to_string(TransitionType t) {
  return t == TransitionType::TypeI ? "Type-I" : "Type-II";
}

std::string_view to_string(BifurcationSide s) {
  switch (s) {
    case BifurcationSide::Below: return "below";
    case BifurcationSide::Above: return "above";
    case BifurcationSide::Both: return "both";
  }
  return "?";
}

namespace {

void require_decided(double B, double b3, const char* name) {
  if (std::abs(B) < 1e-12 * b3)
    throw MarginalTransition(std::string("marginal, undetermined by cubic truncation: ") +
                             name + " = " + std::to_string(B));
}

}  // namespace

TransitionReport classify_transition(const PhysicalParams& p, const DomainSpec& d) {
  p.validate();
  TransitionReport r;
  const Discriminants disc = transition_discriminants(p, d);
  r.Tc = disc.Tc;
  r.m = critical_set(p, d).m();
  r.domain_case = d.domain_case();
  r.at_Tc = derive_coefficients(p, r.Tc);
  r.B1 = disc.B1;
  r.B2 = disc.B2;
  r.B3 = disc.B3;
  r.sigma1 = disc.sigma1;
  r.sigma2 = disc.sigma2;
  const double b3 = r.at_Tc.b3;
  const int total = r.m == 1 ? 2 : r.m == 2 ? 8 : 26;
  Census& c = r.census;
  c.total = total;

  // sigma1 = sigma2 exactly when b3 = 22 L^2 b2^2 / (9 alpha pi^2).
  const double threshold = 22.0 / 9.0 * quadratic_penalty(p, d, r.at_Tc.b2);
  const bool sigma_tie = r.m >= 2 && std::abs(b3 - threshold) < 1e-12 * b3;

  switch (r.m) {
    case 1:
      require_decided(r.B1, b3, "B1");
      if (r.B1 > 0) {
        r.type = TransitionType::TypeI;
        c.below = 2;
        c.attractors = 2;
      } else {
        r.type = TransitionType::TypeII;
        c.above = 2;
        c.saddles = 2;
        c.reduced_repellers = 2;
        r.notes.push_back(
            "the two bifurcated saddles of the full system are repellers of the "
            "one-dimensional reduced equation");
      }
      r.amplitude_law = std::sqrt(4.0 * p.R / (3.0 * std::abs(r.B1) * p.ubar * (1.0 - p.ubar)));
      break;
    case 2:
      require_decided(r.B2, b3, "B2");
      if (r.B2 > 0) {
        r.type = TransitionType::TypeI;
        c.below = 8;
        c.attractors = 4;
        c.saddles = 4;
      } else {
        require_decided(r.B1, b3, "B1");
        r.type = TransitionType::TypeII;
        c.saddles = 8;
        if (r.B1 > 0) {
          c.below = 4;
          c.above = 4;
        } else {
          c.above = 8;
        }
      }
      break;
    default:
      require_decided(r.B3, b3, "B3");
      if (r.B3 > 0) {
        r.type = TransitionType::TypeI;
        c.below = 26;
        c.attractors = b3 < threshold ? 8 : 6;
        c.saddles = 26 - c.attractors;
        if (std::abs(p.alpha - 1.0) > 0.0)
          r.notes.push_back(
              "minimal-attractor threshold uses 22 L^2 b2^2 / (9 alpha pi^2); the form "
              "without alpha differs when alpha != 1");
      } else {
        r.type = TransitionType::TypeII;
        c.saddles = 26;
        require_decided(r.B2, b3, "B2");
        if (r.B2 > 0) {
          c.above = 8;
        } else {
          require_decided(r.B1, b3, "B1");
          c.above = r.B1 > 0 ? 20 : 26;
        }
        c.below = 26 - c.above;
      }
      break;
  }

  if (r.type == TransitionType::TypeI) {
    r.side = BifurcationSide::Below;
    r.attractor_topology = "S^" + std::to_string(r.m - 1);
    r.minimal_attractors = c.attractors;
  } else {
    r.side = c.below > 0 ? BifurcationSide::Both : BifurcationSide::Above;
  }

  if (sigma_tie) {
    c.enumerated = false;
    r.minimal_attractors.reset();
    r.notes.push_back(
        "sigma1 = sigma2 at Tc: bifurcated equilibria form a continuum, orbit count not "
        "enumerated");
  }
  return r;
}

double bifurcated_amplitude(const PhysicalParams& p, const DomainSpec& d, double T) {
  if (d.multiplicity() != 1)
    throw ModelError("the amplitude law applies to a single critical mode");
  const Discriminants disc = transition_discriminants(p, d);
  require_decided(disc.B1, derive_coefficients(p, disc.Tc).b3, "B1");
  if (T == disc.Tc) return 0.0;
  const bool below = T < disc.Tc;
  if ((disc.B1 > 0) != below)
    throw ModelError("no bifurcated equilibrium on this side of Tc");
  return std::sqrt(4.0 * p.R * std::abs(disc.Tc - T) /
                   (3.0 * std::abs(disc.B1) * p.ubar * (1.0 - p.ubar)));
}

CensusCheck census_check(const TransitionReport& report, const PhysicalParams& p,
                         const DomainSpec& d, double rel_offset) {
  CensusCheck out;
  out.expected = report.census;
  out.T_below = report.Tc * (1.0 - rel_offset);
  out.T_above = report.Tc * (1.0 + rel_offset);
  EquilibriumOptions opt;
  opt.sigma_at = SigmaAt::Critical;
  Census& obs = out.observed;
  bool degenerate = false;
  for (double T : {out.T_below, out.T_above}) {
    for (const Equilibrium& e : enumerate_equilibria(p, d, T, opt)) {
      (T < report.Tc ? obs.below : obs.above) += 1;
      ++obs.total;
      switch (e.full_system_kind()) {
        case EquilibriumKind::Attractor: ++obs.attractors; break;
        case EquilibriumKind::Saddle: ++obs.saddles; break;
        default: degenerate = true; break;
      }
      if (e.kind == EquilibriumKind::Repeller) ++obs.reduced_repellers;
    }
  }
  obs.enumerated = !degenerate;

  auto cmp = [&](const char* what, int want, int got) {
    if (want != got)
      out.mismatches.push_back(std::string(what) + ": theorem " + std::to_string(want) +
                               ", enumerated " + std::to_string(got));
  };
  if (!out.expected.enumerated) {
    if (obs.enumerated) out.mismatches.push_back("expected a degenerate continuum");
    return out;
  }
  if (!obs.enumerated) out.mismatches.push_back("enumeration found degenerate equilibria");
  cmp("total", out.expected.total, obs.total);
  cmp("below Tc", out.expected.below, obs.below);
  cmp("above Tc", out.expected.above, obs.above);
  cmp("attractors", out.expected.attractors, obs.attractors);
  cmp("saddles", out.expected.saddles, obs.saddles);
  if (report.m == 1) cmp("reduced repellers", out.expected.reduced_repellers, obs.reduced_repellers);
  return out;
}

nlohmann::json to_json(const Census& c) {
  return {{"enumerated", c.enumerated}, {"total", c.total},
          {"below", c.below},           {"above", c.above},
          {"attractors", c.attractors}, {"saddles", c.saddles},
          {"reduced_repellers", c.reduced_repellers}};
}

nlohmann::json to_json(const TransitionReport& r) {
  nlohmann::json j;
  j["schema_version"] = TransitionReport::kSchemaVersion;
  j["Tc"] = r.Tc;
  j["m"] = r.m;
  j["domain_case"] = std::string(to_string(r.domain_case));
  j["coefficients_at_Tc"] = {{"b1", r.at_Tc.b1}, {"b2", r.at_Tc.b2}, {"b3", r.at_Tc.b3}};
  j["B"] = {r.B1, r.B2, r.B3};
  j["sigma_at_Tc"] = {r.sigma1, r.sigma2};
  j["type"] = std::string(to_string(r.type));
  j["side"] = std::string(to_string(r.side));
  j["census"] = to_json(r.census);
  j["amplitude_law"] = r.amplitude_law ? nlohmann::json(*r.amplitude_law) : nlohmann::json();
  j["attractor_topology"] =
      r.attractor_topology ? nlohmann::json(*r.attractor_topology) : nlohmann::json();
  j["minimal_attractors"] =
      r.minimal_attractors ? nlohmann::json(*r.minimal_attractors) : nlohmann::json();
  j["notes"] = r.notes;
  return j;
}

std::string render_text(const TransitionReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "Dynamic transition report\n";
  os << "  critical temperature Tc = " << r.Tc << "\n";
  os << "  critical modes m = " << r.m << " (" << to_string(r.domain_case) << " box)\n";
  os << "  B1 = " << r.B1 << ", B2 = " << r.B2 << ", B3 = " << r.B3 << "\n";
  os << "  sigma1(Tc) = " << r.sigma1 << ", sigma2(Tc) = " << r.sigma2 << "\n";
  os << "  transition: " << to_string(r.type) << ", bifurcation on "
     << (r.side == BifurcationSide::Below ? "T < Tc"
         : r.side == BifurcationSide::Above ? "T > Tc"
                                            : "both sides of Tc")
     << "\n";
  const Census& c = r.census;
  if (c.enumerated) {
    os << "  bifurcated equilibria: " << c.total << " (" << c.below << " below, " << c.above
       << " above Tc)\n";
    os << "    attractors " << c.attractors << ", saddles " << c.saddles;
    if (c.reduced_repellers) os << " (" << c.reduced_repellers << " repellers in the reduced system)";
    os << "\n";
  } else {
    os << "  bifurcated equilibria: continuum, not enumerated\n";
  }
  if (r.attractor_topology) os << "  bifurcated attractor ~ " << *r.attractor_topology << "\n";
  if (r.minimal_attractors) os << "  minimal attractors: " << *r.minimal_attractors << "\n";
  if (r.amplitude_law)
    os << "  amplitude law: y* = " << *r.amplitude_law << " * sqrt|Tc - T|\n";
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  return os.str();
}

}  // namespace cht
