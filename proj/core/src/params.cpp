#include "cht/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

namespace cht {

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

// --- MobilityProfile -------------------------------------------------------

MobilityProfile MobilityProfile::polynomial(std::vector<double> coeffs,
                                            double lower_bound) {
  if (coeffs.empty()) throw ModelError("mobility polynomial has no coefficients");
  MobilityProfile m;
  m.kind_ = Kind::Polynomial;
  m.coeffs_ = std::move(coeffs);
  m.lower_bound_ = lower_bound;
  return m;
}

MobilityProfile MobilityProfile::table(
    std::vector<std::pair<double, double>> samples, double lower_bound) {
  if (samples.size() < 2) throw ModelError("mobility table needs at least two samples");
  std::sort(samples.begin(), samples.end());
  for (size_t i = 1; i < samples.size(); ++i)
    if (samples[i].first == samples[i - 1].first)
      throw ModelError("mobility table has repeated abscissa");
  MobilityProfile m;
  m.kind_ = Kind::Table;
  m.samples_ = std::move(samples);
  m.lower_bound_ = lower_bound;
  return m;
}

double MobilityProfile::operator()(double s) const {
  if (kind_ == Kind::Polynomial) {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
  }
  if (s <= samples_.front().first) return samples_.front().second;
  if (s >= samples_.back().first) return samples_.back().second;
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), s,
                             [](double v, const auto& e) { return v < e.first; });
  auto lo = hi - 1;
  double w = (s - lo->first) / (hi->first - lo->first);
  return (1.0 - w) * lo->second + w * hi->second;
}

double MobilityProfile::sampled_minimum(double lo, double hi, int samples) const {
  double m = (*this)(lo);
  for (int i = 1; i < samples; ++i) {
    double s = lo + (hi - lo) * i / (samples - 1);
    m = std::min(m, (*this)(s));
  }
  if (kind_ == Kind::Table)
    for (const auto& [s, h] : samples_)
      if (s >= lo && s <= hi) m = std::min(m, h);
  return m;
}

std::array<double, 3> MobilityProfile::taylor(double s) const {
  if (kind_ == Kind::Polynomial) {
    double h = 0, dh = 0, d2h = 0;
    for (size_t k = coeffs_.size(); k-- > 0;) {
      d2h = d2h * s + 2.0 * dh;
      dh = dh * s + h;
      h = h * s + coeffs_[k];
    }
    return {h, dh, d2h};
  }
  const double e = 1e-4;
  double hm = (*this)(s - e), h0 = (*this)(s), hp = (*this)(s + e);
  return {h0, (hp - hm) / (2 * e), (hp - 2 * h0 + hm) / (e * e)};
}

std::string MobilityProfile::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::Polynomial) {
    os << "poly:";
    for (size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
  } else {
    os << "table:";
    for (size_t i = 0; i < samples_.size(); ++i)
      os << (i ? "," : "") << samples_[i].first << ":" << samples_[i].second;
  }
  return os.str();
}

// --- MobilitySpec ----------------------------------------------------------

MobilitySpec MobilitySpec::constant(double h0) { return taylor_only(h0, 0.0, 0.0); }

MobilitySpec MobilitySpec::taylor_only(double h0, double h1, double h2) {
  MobilitySpec m;
  m.h0 = h0;
  m.h1 = h1;
  m.h2 = h2;
  return m;
}

MobilitySpec MobilitySpec::from_profile(MobilityProfile profile, double ubar) {
  auto [h, dh, d2h] = profile.taylor(ubar);
  MobilitySpec m;
  m.h0 = h;
  m.h1 = dh;
  m.h2 = d2h;
  m.profile = std::move(profile);
  return m;
}

void MobilitySpec::validate() const {
  if (!(h0 > 0.0) || !std::isfinite(h0)) throw ModelError("mobility H0 must be positive");
  if (!std::isfinite(h1) || !std::isfinite(h2)) throw ModelError("mobility H1/H2 must be finite");
  if (profile) {
    double floor = profile->lower_bound();
    double mn = profile->sampled_minimum();
    if (!(mn > 0.0))
      throw ModelError("mobility profile is not positive on [0,1] (min " +
                       std::to_string(mn) + ")");
    if (floor > 0.0 && mn < floor)
      throw ModelError("mobility profile falls below its declared lower bound");
  }
}

void PhysicalParams::validate() const {
  if (!(R > 0.0)) throw ModelError("R must be positive");
  if (!(gamma > 0.0)) throw ModelError("gamma must be positive");
  if (!(alpha > 0.0)) throw ModelError("alpha must be positive");
  if (!(ubar > 0.0 && ubar < 1.0)) throw ModelError("ubar must lie in (0,1)");
  mobility.validate();
}

// --- DomainSpec ------------------------------------------------------------

std::string_view to_string(DomainCase c) {
  switch (c) {
    case DomainCase::Distinct: return "distinct";
    case DomainCase::TwoEqual: return "two_equal";
    case DomainCase::AllEqual: return "all_equal";
  }
  return "?";
}

DomainCase domain_case_from_string(std::string_view s) {
  if (s == "distinct" || s == "case1") return DomainCase::Distinct;
  if (s == "two_equal" || s == "case2") return DomainCase::TwoEqual;
  if (s == "all_equal" || s == "case3") return DomainCase::AllEqual;
  throw ModelError("unknown domain case '" + std::string(s) + "'");
}

namespace {

void check_lengths(const std::array<double, 3>& l) {
  for (double v : l)
    if (!(v > 0.0) || !std::isfinite(v)) throw ModelError("box lengths must be positive");
  if (l[0] < l[1] || l[1] < l[2])
    throw ModelError("box lengths must be ordered L1 >= L2 >= L3");
}

DomainCase classify_lengths(const std::array<double, 3>& l, double tol) {
  if (!close_rel(l[0], l[1], tol)) return DomainCase::Distinct;
  if (!close_rel(l[1], l[2], tol)) return DomainCase::TwoEqual;
  return DomainCase::AllEqual;
}

}  // namespace

DomainSpec::DomainSpec(std::array<double, 3> lengths, double tie_tolerance)
    : lengths_(lengths), tie_tolerance_(tie_tolerance) {
  check_lengths(lengths_);
  if (!(tie_tolerance >= 0.0)) throw ModelError("tie tolerance must be non-negative");
  case_ = classify_lengths(lengths_, tie_tolerance_);
}

DomainSpec::DomainSpec(std::array<double, 3> lengths, DomainCase explicit_case,
                       double tie_tolerance)
    : lengths_(lengths), case_(explicit_case), tie_tolerance_(tie_tolerance) {
  check_lengths(lengths_);
  const double tol = std::max(tie_tolerance, kOverrideTolerance);
  const bool eq12 = close_rel(lengths_[0], lengths_[1], tol);
  const bool eq23 = close_rel(lengths_[1], lengths_[2], tol);
  bool ok = false;
  switch (explicit_case) {
    case DomainCase::Distinct: ok = !close_rel(lengths_[0], lengths_[1], tie_tolerance); break;
    case DomainCase::TwoEqual: ok = eq12 && !close_rel(lengths_[1], lengths_[2], tie_tolerance); break;
    case DomainCase::AllEqual: ok = eq12 && eq23; break;
  }
  if (!ok)
    throw ModelError("domain case '" + std::string(to_string(explicit_case)) +
                     "' is inconsistent with the box lengths");
}

int DomainSpec::multiplicity() const {
  switch (case_) {
    case DomainCase::Distinct: return 1;
    case DomainCase::TwoEqual: return 2;
    case DomainCase::AllEqual: return 3;
  }
  return 1;
}

// --- coefficients ----------------------------------------------------------

Coefficients derive_coefficients(const PhysicalParams& p, double T) {
  if (!(T > 0.0)) throw ModelError("temperature must be positive");
  if (!(p.ubar > 0.0 && p.ubar < 1.0)) throw ModelError("ubar must lie in (0,1)");
  const double u = p.ubar, v = 1.0 - p.ubar;
  const double RT = p.R * T;
  Coefficients c;
  c.b1 = RT / (u * v) - 2.0 * p.gamma;
  c.b2 = 0.5 * RT * (1.0 / (v * v) - 1.0 / (u * u));
  c.b3 = RT / 3.0 * (1.0 / (v * v * v) + 1.0 / (u * u * u));
  return c;
}

double critical_temperature(const PhysicalParams& p, const DomainSpec& d) {
  const double drive = 2.0 * p.gamma - p.alpha * kPi * kPi / (d.L() * d.L());
  if (!(drive > 0.0))
    throw NoSupercriticalRegime(
        "no supercritical regime: 2*gamma <= alpha*pi^2/L^2, no positive Tc exists");
  return p.ubar * (1.0 - p.ubar) * drive / p.R;
}

double quadratic_penalty(const PhysicalParams& p, const DomainSpec& d, double b2) {
  return d.L() * d.L() * b2 * b2 / (p.alpha * kPi * kPi);
}

std::pair<double, double> cubic_sigmas(const PhysicalParams& p, const DomainSpec& d,
                                       double T) {
  const Coefficients c = derive_coefficients(p, T);
  const double q = quadratic_penalty(p, d, c.b2);
  return {1.5 * c.b3 - q / 3.0, 3.0 * c.b3 - 4.0 * q};
}

Discriminants transition_discriminants(const PhysicalParams& p, const DomainSpec& d) {
  return transition_discriminants(p, d, critical_temperature(p, d));
}

Discriminants transition_discriminants(const PhysicalParams& p, const DomainSpec& d,
                                       double T) {
  Discriminants out;
  out.Tc = critical_temperature(p, d);
  out.T = T;
  const Coefficients c = derive_coefficients(p, out.Tc);
  const double q = quadratic_penalty(p, d, c.b2);
  out.B1 = c.b3 - 2.0 / 9.0 * q;
  out.B2 = c.b3 - 26.0 / 27.0 * q;
  out.B3 = c.b3 - 10.0 / 9.0 * q;
  std::tie(out.sigma1, out.sigma2) = cubic_sigmas(p, d, T);
  return out;
}

}  // namespace cht
