#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "cht/params.hpp"

namespace cht::testing {

inline constexpr double pi = std::numbers::pi;

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline PhysicalParams canonical() {
  PhysicalParams p;
  p.R = 1.0;
  p.gamma = 1.0;
  p.alpha = 1.0;
  p.ubar = 0.5;
  p.mobility = MobilitySpec::constant(1.0);
  return p;
}

inline DomainSpec box(double l1, double l2, double l3) { return DomainSpec({l1, l2, l3}); }

/// Random parameters with a comfortably supercritical box.
inline std::pair<PhysicalParams, DomainSpec> random_case(std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  PhysicalParams p;
  p.R = 0.5 + 2.0 * U(g);
  p.alpha = 0.2 + 1.5 * U(g);
  p.ubar = 0.05 + 0.9 * U(g);
  p.mobility = MobilitySpec::taylor_only(0.2 + 3.0 * U(g), U(g) - 0.5, U(g));
  std::array<double, 3> L{2.0 + 3.0 * U(g), 0.0, 0.0};
  L[1] = L[0] * (0.3 + 0.6 * U(g));
  L[2] = L[1] * (0.3 + 0.6 * U(g));
  // 2 gamma comfortably above alpha pi^2 / L1^2.
  p.gamma = 0.5 * p.alpha * pi * pi / (L[0] * L[0]) * (1.5 + 3.0 * U(g));
  return {p, DomainSpec(L)};
}

}  // namespace cht::testing
