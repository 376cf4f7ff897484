#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cht {

/// Raised when inputs violate a model precondition (bad parameters, no
/// supercritical regime, inconsistent domain).
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoSupercriticalRegime : public ModelError {
public:
  using ModelError::ModelError;
};

/// Mobility as a function of the absolute molar fraction s.
///
/// Either a polynomial H(s) = sum_k c_k s^k or a table of (s, H) samples
/// interpolated linearly and clamped at the ends.
class MobilityProfile {
public:
  enum class Kind { Polynomial, Table };

  static MobilityProfile polynomial(std::vector<double> coeffs,
                                    double lower_bound = 0.0);
  static MobilityProfile table(std::vector<std::pair<double, double>> samples,
                               double lower_bound = 0.0);

  double operator()(double s) const;

  /// Minimum over uniformly sampled s in [lo, hi].
  double sampled_minimum(double lo = 0.0, double hi = 1.0,
                         int samples = 1001) const;

  /// (H, H', H'') at s. Tables are differentiated by central differences.
  std::array<double, 3> taylor(double s) const;

  Kind kind() const { return kind_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::vector<std::pair<double, double>>& samples() const {
    return samples_;
  }
  /// Declared positive floor B1 of the growth assumption min H >= B1 > 0.
  double lower_bound() const { return lower_bound_; }

  std::string describe() const;

private:
  Kind kind_ = Kind::Polynomial;
  std::vector<double> coeffs_;
  std::vector<std::pair<double, double>> samples_;
  double lower_bound_ = 0.0;
};

/// Onsager mobility data. The transition analysis reads only the Taylor
/// triple (h0, h1, h2) about the mean fraction; the untruncated simulator
/// may use the full profile.
struct MobilitySpec {
  double h0 = 1.0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::optional<MobilityProfile> profile;

  static MobilitySpec constant(double h0);
  static MobilitySpec taylor_only(double h0, double h1, double h2);
  /// Taylor data taken from the profile at ubar.
  static MobilitySpec from_profile(MobilityProfile profile, double ubar);

  /// Quadratic Taylor polynomial H0 + H1 u + H2 u^2 / 2 at deviation u.
  double truncated(double u) const { return h0 + h1 * u + 0.5 * h2 * u * u; }

  /// H(ubar + u) from the profile when present, else the truncated form.
  double at_deviation(double ubar, double u) const {
    return profile ? (*profile)(ubar + u) : truncated(u);
  }

  void validate() const;
};

struct PhysicalParams {
  double R = 1.0;      ///< molar gas constant
  double gamma = 1.0;  ///< repulsive interaction coefficient
  double alpha = 1.0;  ///< gradient energy coefficient
  double ubar = 0.5;   ///< mean molar fraction of A
  MobilitySpec mobility;

  void validate() const;
};

enum class DomainCase { Distinct, TwoEqual, AllEqual };

std::string_view to_string(DomainCase c);
DomainCase domain_case_from_string(std::string_view s);

/// Box (0,L1) x (0,L2) x (0,L3) with L1 >= L2 >= L3.
class DomainSpec {
public:
  static constexpr double kDefaultTieTolerance = 1e-12;
  /// Largest relative gap an explicit case override may paper over.
  static constexpr double kOverrideTolerance = 1e-6;

  explicit DomainSpec(std::array<double, 3> lengths,
                      double tie_tolerance = kDefaultTieTolerance);
  DomainSpec(std::array<double, 3> lengths, DomainCase explicit_case,
             double tie_tolerance = kDefaultTieTolerance);

  const std::array<double, 3>& lengths() const { return lengths_; }
  double length(int axis) const { return lengths_[axis]; }
  /// The longest edge, written L in the transition formulas.
  double L() const { return lengths_[0]; }
  double volume() const { return lengths_[0] * lengths_[1] * lengths_[2]; }
  DomainCase domain_case() const { return case_; }
  double tie_tolerance() const { return tie_tolerance_; }
  /// |P|: 1, 2 or 3.
  int multiplicity() const;

private:
  std::array<double, 3> lengths_;
  DomainCase case_;
  double tie_tolerance_;
};

/// Expansion coefficients of the free-energy derivative about ubar.
struct Coefficients {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

Coefficients derive_coefficients(const PhysicalParams& p, double T);

/// Temperature at which the homogeneous state loses linear stability.
/// Throws NoSupercriticalRegime when 2 gamma <= alpha pi^2 / L^2.
double critical_temperature(const PhysicalParams& p, const DomainSpec& d);

/// B1..B3 are always taken at Tc; sigma1/sigma2 at `T`.
struct Discriminants {
  double T = 0.0;
  double Tc = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

Discriminants transition_discriminants(const PhysicalParams& p,
                                       const DomainSpec& d);
Discriminants transition_discriminants(const PhysicalParams& p,
                                       const DomainSpec& d, double T);

/// L^2 b2^2 / (alpha pi^2), the quantity every discriminant subtracts.
double quadratic_penalty(const PhysicalParams& p, const DomainSpec& d,
                         double b2);

/// The pair (sigma1, sigma2) of the reduced cubic at temperature T.
std::pair<double, double> cubic_sigmas(const PhysicalParams& p,
                                       const DomainSpec& d, double T);

}  // namespace cht
