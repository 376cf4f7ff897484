#include <doctest.h>

#include <random>

#include "cht/manifold.hpp"
#include "support.hpp"

using namespace cht;
using namespace cht::testing;

namespace {

PhysicalParams asymmetric() {
  PhysicalParams p = canonical();
  p.ubar = 0.35;
  p.mobility = MobilitySpec::taylor_only(1.7, 0.4, -0.3);
  return p;
}

std::vector<double> random_y(std::mt19937_64& g, int m, double scale) {
  std::uniform_real_distribution<double> U(-scale, scale);
  std::vector<double> y(m);
  for (double& v : y) v = U(g);
  return y;
}

}  // namespace

TEST_CASE("manifold support") {
  CHECK(manifold_support({{{1, 0, 0}}}) == std::vector<ModeIndex>{{2, 0, 0}});
  CHECK(manifold_support({{{1, 0, 0}, {0, 1, 0}}}).size() == 3);
  CHECK(manifold_support({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}).size() == 6);
}

TEST_CASE("closed-form manifold matches the unreduced quotient at Tc") {
  std::mt19937_64 g(4);
  const PhysicalParams p = asymmetric();
  for (const DomainSpec& d : {box(pi, 2, 1), box(3, 3, 1.5), box(2.5, 2.5, 2.5)}) {
    const double Tc = critical_temperature(p, d);
    for (int n = 0; n < 10; ++n) {
      const ReducedState y{random_y(g, d.multiplicity(), 0.1), Tc};
      const ManifoldCoeffs a = cm_coefficients(y, p, d);
      const ManifoldCoeffs b = cm_quotient(y, p, d);
      CHECK(a.phi.size() == b.phi.size());
      for (const auto& [K, v] : b.phi) CHECK(rel_close(a.at(K), v, 1e-8));
      CHECK_FALSE(a.far_from_critical);
    }
  }
}

TEST_CASE("manifold flags temperatures far from Tc") {
  const PhysicalParams p = asymmetric();
  const DomainSpec d = box(pi, 2, 1);
  const double Tc = critical_temperature(p, d);
  CHECK(cm_coefficients({{0.1}, 0.85 * Tc}, p, d).far_from_critical);
  CHECK_FALSE(cm_coefficients({{0.1}, 0.95 * Tc}, p, d).far_from_critical);
  CHECK_THROWS_AS(cm_coefficients({{0.1, 0.2}, Tc}, p, d), ModelError);
}

TEST_CASE("symmetric mixtures have a flat manifold") {
  const DomainSpec d = box(pi, pi, 1);
  const ManifoldCoeffs a = cm_coefficients({{0.3, -0.2}, 0.24}, canonical(), d);
  for (const auto& [K, v] : a.phi) CHECK(v == 0.0);
}

TEST_CASE("reduced field is the negative gradient of the potential") {
  std::mt19937_64 g(8);
  const PhysicalParams p = asymmetric();
  for (const DomainSpec& d : {box(pi, 2, 1), box(3, 3, 1.5), box(2.5, 2.5, 2.5)}) {
    const double T = 0.97 * critical_temperature(p, d);
    for (SigmaAt at : {SigmaAt::Ambient, SigmaAt::Critical}) {
      const ReducedState y{random_y(g, d.multiplicity(), 0.3), T};
      const auto f = reduced_vector_field(y, p, d, at);
      const auto J = reduced_jacobian(y, p, d, at);
      const int m = d.multiplicity();
      const double h = 1e-5;
      for (int i = 0; i < m; ++i) {
        ReducedState yp = y, ym = y;
        yp.y[i] += h;
        ym.y[i] -= h;
        const double dV =
            (reduced_potential(yp, p, d, at) - reduced_potential(ym, p, d, at)) / (2 * h);
        CHECK(f[i] == doctest::Approx(-dV).scale(1e-3).epsilon(1e-7));
        const auto fp = reduced_vector_field(yp, p, d, at);
        const auto fm = reduced_vector_field(ym, p, d, at);
        for (int r = 0; r < m; ++r)
          CHECK(J[r * m + i] == doctest::Approx((fp[r] - fm[r]) / (2 * h)).scale(1e-3).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("critical field is the beta-free cubic at Tc") {
  const PhysicalParams p = asymmetric();
  const DomainSpec d = box(3, 3, 1.5);
  const double Tc = critical_temperature(p, d);
  const std::vector<double> y{0.2, -0.1};
  const auto a = critical_vector_field(y, p, d);
  const auto b = reduced_vector_field({y, Tc}, p, d);
  for (int i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(b[i]).scale(1e-6).epsilon(1e-9));
}

TEST_CASE("equilibria count 3^m - 1 across both sides of Tc") {
  std::mt19937_64 g(6);
  for (int n = 0; n < 40; ++n) {
    PhysicalParams p = asymmetric();
    p.ubar = std::uniform_real_distribution<double>(0.05, 0.95)(g);
    for (const DomainSpec& d : {box(pi, 2, 1), box(3, 3, 1.5), box(2.5, 2.5, 2.5)}) {
      const double Tc = critical_temperature(p, d);
      EquilibriumOptions opt;
      opt.sigma_at = SigmaAt::Critical;
      const auto below = enumerate_equilibria(p, d, Tc * (1 - 1e-3), opt);
      const auto above = enumerate_equilibria(p, d, Tc * (1 + 1e-3), opt);
      const int m = d.multiplicity();
      CHECK(below.size() + above.size() == static_cast<size_t>(std::pow(3, m) - 1));
      for (const auto& e : below) CHECK(e.residual <= 1e-12);
      for (const auto& e : above) CHECK(e.residual <= 1e-12);
    }
  }
}

TEST_CASE("one-mode equilibria and stability") {
  const PhysicalParams p = canonical();
  const DomainSpec d = box(pi, 2, 1);
  // beta = 0.04, c = 1/2; sigma1 = 1.92 at T and 2 at Tc.
  const auto eq = enumerate_equilibria(p, d, 0.24);
  REQUIRE(eq.size() == 2);
  for (const auto& e : eq) {
    CHECK(e.kind == EquilibriumKind::Attractor);
    CHECK(std::abs(e.y_star[0]) == doctest::Approx(std::sqrt(0.04 / 0.96)));
    CHECK(e.jacobian_eigs[0] == doctest::Approx(-0.08));
  }
  EquilibriumOptions at_tc;
  at_tc.sigma_at = SigmaAt::Critical;
  for (const auto& e : enumerate_equilibria(p, d, 0.24, at_tc))
    CHECK(std::abs(e.y_star[0]) == doctest::Approx(0.2));
  CHECK(enumerate_equilibria(p, d, 0.26).empty());
}

TEST_CASE("two-mode symmetric census") {
  const PhysicalParams p = canonical();
  const DomainSpec d = box(pi, pi, 1);
  const auto eq = enumerate_equilibria(p, d, 0.24);
  CHECK(eq.size() == 8);
  int attractors = 0;
  for (const auto& e : eq) attractors += e.kind == EquilibriumKind::Attractor;
  CHECK(attractors == 4);
}

TEST_CASE("full-system kind turns repellers into saddles") {
  Equilibrium e;
  e.kind = EquilibriumKind::Repeller;
  CHECK(e.full_system_kind() == EquilibriumKind::Saddle);
  e.kind = EquilibriumKind::Attractor;
  CHECK(e.full_system_kind() == EquilibriumKind::Attractor);
}

TEST_CASE("Newton polishing converges to the enumerated points") {
  const PhysicalParams p = asymmetric();
  const DomainSpec d = box(2.5, 2.5, 2.5);
  const double T = 0.99 * critical_temperature(p, d);
  for (const auto& e : enumerate_equilibria(p, d, T)) {
    std::vector<double> guess = e.y_star;
    for (double& v : guess) v *= 1.05;
    const auto y = polish_equilibrium(guess, T, p, d);
    for (size_t i = 0; i < y.size(); ++i)
      CHECK(y[i] == doctest::Approx(e.y_star[i]).scale(1e-3).epsilon(1e-10));
  }
}

TEST_CASE("straight-line orbits are invariant") {
  const std::array<int, 3> counts{1, 4, 13};
  const PhysicalParams p = asymmetric();
  const std::array<DomainSpec, 3> domains{box(pi, 2, 1), box(3, 3, 1.5), box(2.5, 2.5, 2.5)};
  for (int m = 1; m <= 3; ++m) {
    const auto lines = straight_line_orbits(m);
    CHECK(lines.size() == static_cast<size_t>(counts[m - 1]));
    for (const auto& line : lines)
      for (double r : {0.1, -0.3, 1.0}) {
        std::vector<double> y = line.direction;
        for (double& v : y) v *= r;
        const auto f = critical_vector_field(y, p, domains[m - 1]);
        double along = 0.0, norm = 0.0;
        for (int i = 0; i < m; ++i) {
          along += f[i] * line.direction[i];
          norm += f[i] * f[i];
        }
        double perp = 0.0;
        for (int i = 0; i < m; ++i) {
          const double c = f[i] - along * line.direction[i];
          perp += c * c;
        }
        CHECK(std::sqrt(perp) <= 1e-12 * std::sqrt(norm));
      }
  }
  CHECK_THROWS_AS(straight_line_orbits(4), ModelError);
}

TEST_CASE("RK4 reproduces the logistic solution") {
  const PhysicalParams p = asymmetric();
  const DomainSpec d = box(pi, 2, 1);
  const double T = 0.98 * critical_temperature(p, d);
  const double beta = growth_rate({1, 0, 0}, T, p, d);
  const double a = cubic_prefactor(p, d) * cubic_sigmas(p, d, T).first;
  const double y0 = 0.01;
  ReducedIntegrationOptions opt;
  opt.dt = 0.05 / beta;
  opt.steps = 400;
  const auto run = integrate_reduced({{y0}, T}, p, d, opt);
  CHECK_FALSE(run.escaped);
  for (const auto& pt : run.trajectory) {
    const double exact =
        std::sqrt(beta / (a + (beta / (y0 * y0) - a) * std::exp(-2 * beta * pt.t)));
    CHECK(pt.y[0] == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("the origin is invariant and blow-up is detected") {
  const PhysicalParams p = asymmetric();
  const DomainSpec d = box(3, 3, 1.5);
  const auto run = integrate_reduced({{0.0, 0.0}, 0.9 * critical_temperature(p, d)}, p, d);
  for (const auto& pt : run.trajectory) CHECK(pt.y == std::vector<double>{0.0, 0.0});

  // A subcritical cubic (sigma < 0) escapes in finite time.
  PhysicalParams q = canonical();
  q.ubar = 0.15;
  const DomainSpec d1 = box(10, 1, 0.8);
  REQUIRE(cubic_sigmas(q, d1, critical_temperature(q, d1)).first < 0.0);
  ReducedIntegrationOptions opt;
  opt.dt = 0.01;
  opt.steps = 100000;
  const auto esc = integrate_reduced({{0.5}, 1.01 * critical_temperature(q, d1)}, q, d1, opt);
  CHECK(esc.escaped);
}
