#pragma once

// Centre-manifold reduction onto the critical modes P and analysis of the
// resulting cubic system
//
//   dy_J/dt = beta_J(T) y_J - c y_J (sigma1 y_J^2 + sigma2 sum_{L != J} y_L^2),
//   c = H(ubar) pi^2 / (2 L^2).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cht/linstab.hpp"
#include "cht/params.hpp"
#include "cht/spectral.hpp"

namespace cht {

/// Coordinates on the critical eigenspace, ordered as the critical set.
struct ReducedState {
  std::vector<double> y;
  double T = 0.0;
};

/// Which temperature the cubic coefficients sigma1/sigma2 are taken at.
enum class SigmaAt { Ambient, Critical };

/// Phi_K on the support S = {J + L : J, L in P}.
struct ManifoldCoeffs {
  std::map<ModeIndex, double> phi;
  /// |T - Tc| / Tc >= 0.1: the leading-order expansion is not trustworthy.
  bool far_from_critical = false;
  double at(const ModeIndex& K) const {
    auto it = phi.find(K);
    return it == phi.end() ? 0.0 : it->second;
  }
};

/// S = {J + L : J, L in P}, sorted.
std::vector<ModeIndex> manifold_support(const CriticalSet& P);

/// Leading-order centre-manifold function: Phi_{2J} = -b2 y_J^2 / (6 alpha rho_J),
/// Phi_{J+L} = -2 b2 y_J y_L / (alpha rho_J), b2 at the state's temperature.
ManifoldCoeffs cm_coefficients(const ReducedState& y, const PhysicalParams& p,
                               const DomainSpec& d);

/// The unreduced quotient form
///   Phi_K = H b2 rho_K sum_{J,L in P} y_J y_L int e_J e_L e_K / (beta_K(T) <e_K,e_K>)
/// over every non-critical K with k_i <= 2 whose triple product is nonzero.
ManifoldCoeffs cm_quotient(const ReducedState& y, const PhysicalParams& p,
                           const DomainSpec& d);

/// H(ubar) pi^2 / (2 L^2).
double cubic_prefactor(const PhysicalParams& p, const DomainSpec& d);

std::vector<double> reduced_vector_field(const ReducedState& y, const PhysicalParams& p,
                                         const DomainSpec& d,
                                         SigmaAt sigma_at = SigmaAt::Ambient);

/// beta = 0 and sigma at Tc: the homogeneous cubic that decides the type.
std::vector<double> critical_vector_field(const std::vector<double>& y,
                                          const PhysicalParams& p, const DomainSpec& d);

/// Symmetric Jacobian of the reduced field, row-major m x m.
std::vector<double> reduced_jacobian(const ReducedState& y, const PhysicalParams& p,
                                     const DomainSpec& d,
                                     SigmaAt sigma_at = SigmaAt::Ambient);

/// V with field = -grad V:
///   V = -beta/2 |y|^2 + c (sigma1/4 sum y_J^4 + sigma2/2 sum_{J<L} y_J^2 y_L^2).
double reduced_potential(const ReducedState& y, const PhysicalParams& p,
                         const DomainSpec& d, SigmaAt sigma_at = SigmaAt::Ambient);

enum class EquilibriumKind { Attractor, Saddle, Repeller, Degenerate };
std::string_view to_string(EquilibriumKind k);

struct Equilibrium {
  std::vector<double> y_star;
  std::vector<double> jacobian_eigs;  ///< ascending
  EquilibriumKind kind = EquilibriumKind::Degenerate;
  double T = 0.0;
  double residual = 0.0;
  int support = 0;  ///< number of nonzero coordinates

  /// Classification in the full system, where the stable modes add
  /// infinitely many negative directions: any unstable direction is a saddle.
  EquilibriumKind full_system_kind() const;
};

struct EquilibriumOptions {
  SigmaAt sigma_at = SigmaAt::Ambient;
  /// Eigenvalues with |lambda| <= tol * |beta| count as zero.
  double degeneracy_tol = 1e-9;
};

/// Nonzero solutions of beta y_J = y_J (a1 y_J^2 + a2 sum_{L != J} y_L^2),
/// by case analysis over support patterns. Returns only the real solutions
/// present at T; across both sides of Tc they total 3^m - 1 when regular.
/// When a1 == a2 the multi-mode solutions form a continuum; the
/// equal-amplitude points on it are returned and classify as Degenerate.
std::vector<Equilibrium> enumerate_equilibria(const PhysicalParams& p, const DomainSpec& d,
                                              double T, const EquilibriumOptions& opt = {});

/// Newton iteration on the reduced steady-state equation.
std::vector<double> polish_equilibrium(std::vector<double> y, double T,
                                       const PhysicalParams& p, const DomainSpec& d,
                                       SigmaAt sigma_at = SigmaAt::Ambient,
                                       int max_iter = 50);

struct LineOrbit {
  std::vector<double> direction;  ///< unit vector; the line carries two orbits
  std::string label;
};

/// Invariant lines of the critical cubic for sigma1 != sigma2: m=1 one line,
/// m=2 four (axes and diagonals), m=3 thirteen (3 axes, 6 plane diagonals,
/// 4 space diagonals).
std::vector<LineOrbit> straight_line_orbits(int m);

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<double> y;
};

struct ReducedIntegration {
  std::vector<TrajectoryPoint> trajectory;
  bool escaped = false;  ///< left the escape radius (Type-II jump)
  double escape_time = 0.0;
};

struct ReducedIntegrationOptions {
  double dt = 0.01;
  long steps = 1000;
  long record_every = 1;
  double escape_radius = 1e3;
  SigmaAt sigma_at = SigmaAt::Ambient;
};

/// One classical fourth-order Runge-Kutta step of the reduced field.
std::vector<double> rk4_step(const std::vector<double>& y, double dt, double T,
                             const PhysicalParams& p, const DomainSpec& d,
                             SigmaAt sigma_at = SigmaAt::Ambient);

ReducedIntegration integrate_reduced(const ReducedState& y0, const PhysicalParams& p,
                                     const DomainSpec& d,
                                     const ReducedIntegrationOptions& opt = {});

}  // namespace cht
