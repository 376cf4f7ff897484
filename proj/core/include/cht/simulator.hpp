#pragma once

// Pseudospectral time stepping of
//
//   u_t = div( H(ubar + u) grad mu ),  mu = -alpha Lap u + b1 u + b2 u^2 + b3 u^3,
//
// on the box with no-flux walls, in the cosine basis. The linear part
// L_T = -alpha H0 Lap^2 + b1 H0 Lap is diagonal and taken implicitly; the
// remainder G is formed on a zero-padded grid and taken explicitly.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cht/linstab.hpp"
#include "cht/manifold.hpp"
#include "cht/params.hpp"
#include "cht/spectral.hpp"

namespace cht {

/// A step produced a non-finite state. The input state is left unchanged.
class StepRejected : public std::runtime_error {
public:
  StepRejected(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
  double time() const { return t_; }

private:
  double t_;
};

struct SimState {
  SpectralField u;  ///< deviation from ubar; zero mode pinned to 0
  double t = 0.0;
  double T = 0.0;
  PhysicalParams params;
  DomainSpec domain{{1.0, 1.0, 1.0}};
};

/// IMEX1: backward Euler on L_T, forward Euler on G.
/// IMEX2: Crank-Nicolson on L_T, Adams-Bashforth 2 on G. Crank-Nicolson does
/// not damp the highest modes, so with a concentration-dependent mobility
/// the explicit flux can destabilise them; stabilization ~ alpha H0 cures it.
/// Even then the stiff modes decay with complex amplification factors, so
/// the free energy need not fall monotonically unless dt resolves them.
/// Use IMEX1 when monotone energy decay is required.
enum class Scheme { IMEX1, IMEX2 };
/// Taylor: mobility expanded to second order and the flux truncated at cubic
/// order in u. Divergence: the untruncated flux with H(ubar + u) from the
/// profile (or the quadratic Taylor polynomial when no profile is given).
enum class RhsModel { Taylor, Divergence };

std::string_view to_string(Scheme s);
std::string_view to_string(RhsModel m);
Scheme scheme_from_string(std::string_view s);
RhsModel rhs_model_from_string(std::string_view s);

struct StepConfig {
  double dt = 0.1;
  Scheme scheme = Scheme::IMEX1;
  /// s: s Lap^2 u is added to the implicit side and subtracted explicitly.
  double stabilization = 0.0;
  /// Same splitting with -Lap u, for stiff lower-order terms.
  double diffusive_stabilization = 0.0;
  GridShape grid{32, 32, 32};  ///< retained modes per axis
  bool dealias = true;         ///< products on a 2x padded grid
  RhsModel model = RhsModel::Divergence;

  void validate() const;
};

struct Diagnostics {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double energy_dissipation = 0.0;
  std::vector<double> mode_amplitudes;  ///< coefficients on the critical modes
};

/// Holds transforms and multistep history for one (state shape, config).
/// Not thread-safe; use one per simulation.
class Stepper {
public:
  Stepper(const SimState& s, const StepConfig& c);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// Advance in place. Throws StepRejected on a non-finite result.
  void step(SimState& s);
  /// Forget the Adams-Bashforth history (e.g. after editing the state).
  void reset_history();

  /// Free energy of the state passed to the most recent step().
  double last_energy() const;
  /// Grid mean of u at the most recent step().
  double last_mass() const;

  double free_energy(const SimState& s);
  SpectralField chemical_potential(const SimState& s);
  double dissipation(const SimState& s);
  /// The full right-hand side P_N div(H grad mu) in coefficient space.
  SpectralField rhs(const SimState& s);

  const StepConfig& config() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One step with a fresh Stepper (no multistep history: IMEX2 starts with
/// an Euler predictor on G).
SimState step(const SimState& s, const StepConfig& c);

/// int alpha/2 |grad u|^2 + b1 u^2/2 + b2 u^3/3 + b3 u^4/4: the gradient term
/// in coefficient space, the rest by quadrature on the padded grid.
double free_energy(const SimState& s, const StepConfig& c = {});
SpectralField chemical_potential(const SimState& s, const StepConfig& c = {});
/// -int H(ubar + u) |grad mu|^2.
double dissipation(const SimState& s, const StepConfig& c = {});

struct SimulateOptions {
  double t_end = 100.0;
  long record_every = 10;  ///< steps between recorded diagnostics
  /// Stop once ||(u+ - u)/dt|| < steady_tol (1 + ||u||) in coefficient l2.
  double steady_tol = 1e-10;
  bool stop_at_steady = true;
  /// Per-step allowance for energy increase, relative to 1 + |G|.
  double energy_tol = 1e-8;
  /// Keep full coefficient snapshots at recorded times.
  bool keep_snapshots = false;
};

struct SimulationResult {
  SimState final_state;
  std::vector<Diagnostics> series;
  std::vector<SpectralField> snapshots;
  long steps = 0;
  bool converged = false;
  double steady_residual = 0.0;  ///< last ||du/dt|| / (1 + ||u||)
  double max_abs_mass = 0.0;     ///< over every step
  bool energy_monotone = true;
  double max_energy_increase = 0.0;  ///< largest (G_{n+1} - G_n) / (1 + |G_n|)
  std::vector<ModeIndex> critical_modes;
  std::vector<double> terminal_amplitudes;
};

SimulationResult simulate(const SimState& s0, const StepConfig& c,
                          const SimulateOptions& opt = {});

/// Modes of the critical set for the state's parameters; falls back to the
/// (1,0,0) .. ordering of the domain multiplicity when Tc does not exist.
std::vector<ModeIndex> diagnostic_modes(const PhysicalParams& p, const DomainSpec& d);

/// Independent uniform coefficients in [-amplitude, amplitude] on modes
/// with every k_i <= band (zero mode excluded), from a seeded generator.
SpectralField random_field(GridShape modes, double amplitude, int band, std::uint64_t seed);

/// Sum of amplitude * e_K over the given modes.
SpectralField mode_field(GridShape modes,
                         const std::vector<std::pair<ModeIndex, double>>& terms);

/// Critical-mode projections of the PDE against the reduced system, both
/// started from u0 = sum_J y0_J e_J and sampled at every step.
struct ShadowingResult {
  double horizon = 0.0;
  double reference_amplitude = 0.0;  ///< largest |y*_J| of the bifurcated equilibria
  double max_deviation = 0.0;        ///< max over t, J of |y_pde - y_red|
  double relative_deviation = 0.0;   ///< max_deviation / reference_amplitude
  std::vector<double> t;
  std::vector<std::vector<double>> pde;
  std::vector<std::vector<double>> reduced;
};

/// horizon <= 0 selects one relaxation time 1 / |beta_(1,0,0)(T)|.
ShadowingResult shadow_reduced(const PhysicalParams& p, const DomainSpec& d, double T,
                               const std::vector<double>& y0, const StepConfig& c,
                               double horizon = 0.0);

struct SweepPoint {
  double T = 0.0;
  double amplitude = 0.0;  ///< |terminal coefficient| on the first critical mode
  double predicted = 0.0;  ///< amplitude law, NaN off the bifurcated side or m > 1
  long steps = 0;
  bool converged = false;
  bool energy_monotone = true;
  double max_abs_mass = 0.0;
  double max_energy_increase = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Least-squares fit log amplitude = intercept + slope log(Tc - T) over
  /// the points with T < Tc; NaN with fewer than two.
  double slope = 0.0;
  double intercept = 0.0;
};

/// One simulation per temperature from the same initial state, run on
/// `threads` workers (0: hardware concurrency). Results are ordered as
/// `temperatures` and independent of the thread count.
SweepResult amplitude_sweep(const SimState& base, const std::vector<double>& temperatures,
                            const StepConfig& c, const SimulateOptions& opt, int threads = 0);

/// Slope and intercept of the least-squares line through (x, y).
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cht
