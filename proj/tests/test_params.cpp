#include <doctest.h>

#include <cstring>
#include <random>

#include "cht/linstab.hpp"
#include "cht/params.hpp"
#include "support.hpp"

using namespace cht;
using namespace cht::testing;

namespace {

// g(s) = RT ln(s / (1 - s)) - 2 gamma s; b_k = g^(k)(ubar) / k!.
double g(double s, const PhysicalParams& p, double T) {
  return p.R * T * std::log(s / (1.0 - s)) - 2.0 * p.gamma * s;
}

}  // namespace

TEST_CASE("coefficients are the Taylor data of the free-energy derivative") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    PhysicalParams p = canonical();
    p.R = 0.5 + U(rng);
    p.gamma = 0.5 + U(rng);
    p.ubar = 0.1 + 0.8 * U(rng);
    const double T = 0.05 + U(rng);
    const Coefficients c = derive_coefficients(p, T);
    const double h = 1e-3, u = p.ubar;
    auto f = [&](double s) { return g(s, p, T); };
    const double d1 = (f(u - 2 * h) - 8 * f(u - h) + 8 * f(u + h) - f(u + 2 * h)) / (12 * h);
    const double d2 =
        (-f(u - 2 * h) + 16 * f(u - h) - 30 * f(u) + 16 * f(u + h) - f(u + 2 * h)) / (12 * h * h);
    const double d3 = (-f(u + 3 * h) + 8 * f(u + 2 * h) - 13 * f(u + h) + 13 * f(u - h) -
                       8 * f(u - 2 * h) + f(u - 3 * h)) /
                      (8 * h * h * h);
    CHECK(c.b1 == doctest::Approx(d1).epsilon(1e-8));
    CHECK(c.b2 == doctest::Approx(d2 / 2).scale(c.b3).epsilon(1e-5));
    CHECK(c.b3 == doctest::Approx(d3 / 6).epsilon(1e-5));
  }
}

TEST_CASE("symmetric mixture has no quadratic term") {
  const PhysicalParams p = canonical();
  const Coefficients c = derive_coefficients(p, 0.24);
  CHECK(c.b2 == 0.0);
  CHECK(c.b1 == doctest::Approx(4 * 0.24 - 2));
  CHECK(c.b3 == doctest::Approx(0.24 * 16.0 / 3.0));
}

TEST_CASE("critical temperature zeroes the first mode's growth rate") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    auto [p, d] = random_case(rng);
    const double Tc = critical_temperature(p, d);
    const double scale = p.mobility.h0 * p.alpha * std::pow(pi / d.L(), 4);
    CHECK(std::abs(growth_rate({1, 0, 0}, Tc, p, d)) <= 1e-12 * scale);
    CHECK(growth_rate({1, 0, 0}, Tc * 0.99, p, d) > 0.0);
    CHECK(growth_rate({1, 0, 0}, Tc * 1.01, p, d) < 0.0);
  }
}

TEST_CASE("canonical critical temperature") {
  CHECK(critical_temperature(canonical(), box(pi, 2, 1)) == doctest::Approx(0.25));
}

TEST_CASE("boxes too small for a supercritical regime are refused") {
  PhysicalParams p = canonical();
  p.gamma = 0.4;  // 2 gamma < pi^2 / pi^2
  CHECK_THROWS_AS(critical_temperature(p, box(pi, 2, 1)), NoSupercriticalRegime);
}

TEST_CASE("discriminants satisfy the sigma identities at Tc") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    auto [p, d] = random_case(rng);
    const Discriminants x = transition_discriminants(p, d);
    CHECK(rel_close(x.sigma1, 1.5 * x.B1, 1e-12));
    CHECK(rel_close(x.sigma1 + x.sigma2, 4.5 * x.B2, 1e-12));
    CHECK(rel_close(x.sigma1 + 2 * x.sigma2, 7.5 * x.B3, 1e-12));
  }
}

TEST_CASE("discriminants at ubar = 1/2 all equal b3") {
  const Discriminants x = transition_discriminants(canonical(), box(pi, 2, 1));
  const double b3 = derive_coefficients(canonical(), 0.25).b3;
  CHECK(x.B1 == b3);
  CHECK(x.B2 == b3);
  CHECK(x.B3 == b3);
}

TEST_CASE("mobility never enters the discriminants") {
  PhysicalParams a = canonical();
  a.ubar = 0.37;
  PhysicalParams b = a;
  b.mobility = MobilitySpec::taylor_only(3.0, -0.7, 5.0);
  const DomainSpec d = box(4, 3, 1);
  const Discriminants x = transition_discriminants(a, d, 0.2);
  const Discriminants y = transition_discriminants(b, d, 0.2);
  CHECK(std::memcmp(&x, &y, sizeof x) == 0);
}

TEST_CASE("domain case detection and overrides") {
  CHECK(box(pi, 2, 1).domain_case() == DomainCase::Distinct);
  CHECK(box(pi, pi, 1).domain_case() == DomainCase::TwoEqual);
  CHECK(box(2, 2, 2).domain_case() == DomainCase::AllEqual);
  CHECK(box(2, 2, 2).multiplicity() == 3);
  CHECK_THROWS_AS(box(1, 2, 3), ModelError);
  CHECK_THROWS_AS(box(2, 1, -1), ModelError);

  // A near-tie within the tie tolerance counts as equal.
  CHECK(DomainSpec({2.0, 2.0 * (1 - 1e-9), 1.0}, 1e-8).domain_case() == DomainCase::TwoEqual);
  CHECK(DomainSpec({2.0, 2.0 * (1 - 1e-9), 1.0}).domain_case() == DomainCase::Distinct);
  // Overrides may only paper over gaps below 1e-6.
  CHECK(DomainSpec({2.0, 2.0 * (1 - 1e-9), 1.0}, DomainCase::TwoEqual).multiplicity() == 2);
  CHECK_THROWS_AS(DomainSpec({2.0, 1.9, 1.0}, DomainCase::TwoEqual), ModelError);
  CHECK_THROWS_AS(DomainSpec({2.0, 2.0, 1.0}, DomainCase::Distinct), ModelError);
  CHECK(domain_case_from_string("case3") == DomainCase::AllEqual);
  CHECK_THROWS_AS(domain_case_from_string("case4"), ModelError);
}

TEST_CASE("mobility profiles") {
  const auto poly = MobilityProfile::polynomial({1.0, -2.0, 2.0});
  const auto [h, dh, d2h] = poly.taylor(0.3);
  CHECK(h == doctest::Approx(1 - 0.6 + 0.18));
  CHECK(dh == doctest::Approx(-2 + 1.2));
  CHECK(d2h == doctest::Approx(4.0));
  CHECK(poly.sampled_minimum() == doctest::Approx(0.5));

  const auto table = MobilityProfile::table({{1.0, 3.0}, {0.0, 1.0}});
  CHECK(table(0.25) == doctest::Approx(1.5));
  CHECK(table(-1.0) == 1.0);
  CHECK(table(2.0) == 3.0);
  CHECK(table.taylor(0.5)[1] == doctest::Approx(2.0));

  const MobilitySpec m = MobilitySpec::from_profile(poly, 0.5);
  CHECK(m.h0 == doctest::Approx(0.5));
  CHECK(m.h1 == doctest::Approx(0.0));
  CHECK(m.h2 == doctest::Approx(4.0));
  CHECK(m.at_deviation(0.5, 0.1) == doctest::Approx(poly(0.6)));
  CHECK(m.truncated(0.1) == doctest::Approx(0.5 + 0.5 * 4.0 * 0.01));

  PhysicalParams p = canonical();
  p.mobility = MobilitySpec::from_profile(MobilityProfile::polynomial({0.5, -1.0}), 0.5);
  CHECK_THROWS_AS(p.validate(), ModelError);  // negative for s > 1/2
  p.mobility = MobilitySpec::from_profile(MobilityProfile::polynomial({0.5, 1.0}, 0.6), 0.5);
  CHECK_THROWS_AS(p.validate(), ModelError);  // below its declared floor at s = 0
  p.mobility = MobilitySpec::constant(0.0);
  CHECK_THROWS_AS(p.validate(), ModelError);
}

TEST_CASE("parameter validation") {
  PhysicalParams p = canonical();
  p.ubar = 1.0;
  CHECK_THROWS_AS(p.validate(), ModelError);
  p = canonical();
  p.alpha = -1;
  CHECK_THROWS_AS(p.validate(), ModelError);
  CHECK_THROWS_AS(derive_coefficients(canonical(), 0.0), ModelError);
}
