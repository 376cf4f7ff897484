#include "cht/linstab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cht {

double growth_rate(const ModeIndex& K, double T, const PhysicalParams& p,
                   const DomainSpec& d) {
  if (!(T > 0.0)) throw ModelError("temperature must be positive");
  const double rho = laplacian_eigenvalue(K, d);
  const double drive = 2.0 * p.gamma - p.R * T / (p.ubar * (1.0 - p.ubar));
  return p.mobility.h0 * rho * (drive - p.alpha * rho);
}

std::vector<ModeIndex> scan_modes(int k_max) {
  std::vector<ModeIndex> out;
  for (int i = 0; i <= k_max; ++i)
    for (int j = 0; j <= k_max; ++j)
      for (int k = 0; k <= k_max; ++k)
        if (i || j || k) out.emplace_back(i, j, k);
  return out;
}

CriticalSet critical_set(const PhysicalParams& p, const DomainSpec& d) {
  const double Tc = critical_temperature(p, d);
  CriticalSet cs;
  cs.modes.emplace_back(1, 0, 0);
  if (d.multiplicity() >= 2) cs.modes.emplace_back(0, 1, 0);
  if (d.multiplicity() >= 3) cs.modes.emplace_back(0, 0, 1);

  // A mode outside P whose rate at Tc is within round-off of zero means the
  // box sits on a tie the tolerance did not resolve.
  const double scale = p.mobility.h0 * p.alpha * std::pow(std::numbers::pi / d.L(), 4);
  for (const ModeIndex& K : {ModeIndex{0, 1, 0}, ModeIndex{0, 0, 1}}) {
    if (std::find(cs.modes.begin(), cs.modes.end(), K) != cs.modes.end()) continue;
    const double beta = growth_rate(K, Tc, p, d);
    if (std::abs(beta) <= 1e-9 * scale)
      throw AmbiguousDomain("mode " + K.str() + " is critical to within " +
                            std::to_string(std::abs(beta)) +
                            "; box lengths are tied beyond the tie tolerance");
  }
  return cs;
}

PesReport verify_pes(const PhysicalParams& p, const DomainSpec& d, const PesScan& scan) {
  PesReport r;
  r.Tc = critical_temperature(p, d);
  const CriticalSet cs = critical_set(p, d);
  r.critical_modes = cs.modes;

  std::vector<double> temps = scan.temperatures;
  if (temps.empty()) temps = {r.Tc * 0.99, r.Tc, r.Tc * 1.01};

  // Exact zero at Tc is only attainable up to round-off in Tc itself.
  const double zero_tol = 1e-9 * p.mobility.h0 * p.alpha *
                          std::pow(std::numbers::pi / d.L(), 4);
  r.margin = std::numeric_limits<double>::infinity();
  for (const ModeIndex& K : scan_modes(scan.k_max)) {
    const bool critical = std::find(cs.modes.begin(), cs.modes.end(), K) != cs.modes.end();
    if (critical) {
      for (double T : temps) {
        const double beta = growth_rate(K, T, p, d);
        const bool ok = T > r.Tc ? beta < 0.0 : T < r.Tc ? beta > 0.0 : std::abs(beta) <= zero_tol;
        if (!ok) r.violations.push_back({K, T, beta, "critical mode has wrong sign"});
      }
    } else {
      const double beta = growth_rate(K, r.Tc, p, d);
      if (!(beta < 0.0)) r.violations.push_back({K, r.Tc, beta, "non-critical mode not stable at Tc"});
      if (std::abs(beta) < r.margin) {
        r.margin = std::abs(beta);
        r.margin_mode = K;
      }
    }
  }
  // beta_K < 0 for every T > 0 once alpha rho_K > 2 gamma.
  double rho_min_outside = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double w = (scan.k_max + 1) * std::numbers::pi / d.length(a);
    rho_min_outside = std::min(rho_min_outside, w * w);
  }
  r.tail_certified = p.alpha * rho_min_outside > 2.0 * p.gamma;
  return r;
}

double critical_temperature_bisect(const PhysicalParams& p, const DomainSpec& d,
                                   std::optional<std::pair<double, double>> bracket,
                                   int k_max) {
  const auto modes = scan_modes(k_max);
  auto f = [&](double T) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& K : modes) best = std::max(best, growth_rate(K, T, p, d));
    return best;
  };
  // Above 2 gamma ubar (1 - ubar) / R every rate is negative.
  const double t_hi_default = 2.0 * p.gamma * p.ubar * (1.0 - p.ubar) / p.R;
  auto [lo, hi] = bracket.value_or(std::pair{t_hi_default * 1e-12, t_hi_default});
  if (!(lo > 0.0) || !(hi > lo)) throw ModelError("invalid temperature bracket");
  double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0 && fhi <= 0.0))
    throw NoSupercriticalRegime("no sign change of the leading growth rate in the bracket");
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cht
