#include "cht/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "cht/classifier.hpp"

namespace cht {

std::string_view to_string(Scheme s) { return s == Scheme::IMEX1 ? "imex1" : "imex2"; }
std::string_view to_string(RhsModel m) {
  return m == RhsModel::Taylor ? "taylor" : "divergence";
}

Scheme scheme_from_string(std::string_view s) {
  if (s == "imex1" || s == "IMEX1") return Scheme::IMEX1;
  if (s == "imex2" || s == "IMEX2") return Scheme::IMEX2;
  throw ModelError("unknown scheme '" + std::string(s) + "' (imex1 | imex2)");
}

RhsModel rhs_model_from_string(std::string_view s) {
  if (s == "taylor") return RhsModel::Taylor;
  if (s == "divergence") return RhsModel::Divergence;
  throw ModelError("unknown model '" + std::string(s) + "' (taylor | divergence)");
}

void StepConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ModelError("dt must be positive");
  if (!(stabilization >= 0.0) || !(diffusive_stabilization >= 0.0))
    throw ModelError("stabilization must be non-negative");
  // Room for the critical modes and their quadratic harmonics.
  for (int n : grid)
    if (n < 6) throw ModelError("grid needs at least 6 modes per axis");
}

struct Stepper::Impl {
  StepConfig cfg;
  PhysicalParams p;
  DomainSpec d;
  double T = 0.0;
  Coefficients b;
  GridShape modes;
  CosineTransform tf;

  std::vector<double> rho;      // per coefficient
  std::vector<double> lambda;   // beta_K(T)
  std::vector<double> shift;    // lambda - lambda_tilde
  std::vector<double> weight;   // <e_K, e_K>

  RealGrid ug, work, grad, flux, hgrid;
  SpectralField mu_nl, q2, mu, G, G_prev, scratch;
  bool has_prev = false;
  bool variable_h = false;
  double energy = 0.0;
  double mass = 0.0;

  static GridShape padded(const StepConfig& c) {
    return c.dealias ? GridShape{2 * c.grid[0], 2 * c.grid[1], 2 * c.grid[2]} : c.grid;
  }

  Impl(const SimState& s, const StepConfig& c)
      : cfg(c), p(s.params), d(s.domain), modes(c.grid), tf(c.grid, padded(c), s.domain) {
    cfg.validate();
    p.validate();
    const std::size_t n = static_cast<std::size_t>(modes[0]) * modes[1] * modes[2];
    rho.resize(n);
    weight.resize(n);
    for (int i = 0; i < modes[0]; ++i)
      for (int j = 0; j < modes[1]; ++j)
        for (int k = 0; k < modes[2]; ++k) {
          const std::size_t idx = (static_cast<std::size_t>(i) * modes[1] + j) * modes[2] + k;
          rho[idx] = laplacian_eigenvalue({i, j, k}, d);
          weight[idx] = mode_l2_norm_sq({i, j, k}, d);
        }
    const auto& m = p.mobility;
    if (cfg.model == RhsModel::Divergence)
      variable_h = m.profile ? !(m.profile->kind() == MobilityProfile::Kind::Polynomial &&
                                 m.profile->coeffs().size() <= 1 &&
                                 (m.profile->coeffs().empty() || m.profile->coeffs()[0] == m.h0))
                             : (m.h1 != 0.0 || m.h2 != 0.0);
    else
      variable_h = m.h1 != 0.0 || m.h2 != 0.0;
    set_temperature(s.T);
  }

  void set_temperature(double t) {
    if (!(t > 0.0)) throw ModelError("temperature must be positive");
    T = t;
    b = derive_coefficients(p, T);
    const double h0 = p.mobility.h0;
    lambda.resize(rho.size());
    shift.resize(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      lambda[i] = -h0 * rho[i] * (p.alpha * rho[i] + b.b1);
      shift[i] = cfg.stabilization * rho[i] * rho[i] + cfg.diffusive_stabilization * rho[i];
      const double lt = lambda[i] - shift[i];
      const double theta = cfg.scheme == Scheme::IMEX1 ? 1.0 : 0.5;
      if (!(1.0 - theta * cfg.dt * lt > 0.0))
        throw ModelError("dt too large: implicit factor for an unstable mode is not positive");
    }
    has_prev = false;
  }

  void check(const SimState& s) {
    if (s.u.modes() != modes) throw ModelError("state shape does not match the step grid");
    if (s.T != T) set_temperature(s.T);
  }

  // u on the padded grid, nonlinear chemical potential, energy and mass.
  void evaluate(const SpectralField& u) {
    tf.to_grid(u, ug);
    mass = ug.mean();
    const bool split = cfg.model == RhsModel::Taylor && variable_h;
    if (work.shape != ug.shape) work = RealGrid(ug.shape);
    double poly = 0.0;
    for (std::size_t i = 0; i < ug.size(); ++i) {
      const double v = ug.values[i];
      work.values[i] = split ? b.b3 * v * v * v : v * v * (b.b2 + b.b3 * v);
      poly += v * v * (0.5 * b.b1 + v * (b.b2 / 3.0 + 0.25 * b.b3 * v));
    }
    tf.to_spectral(work, mu_nl);
    if (split) {
      for (std::size_t i = 0; i < ug.size(); ++i) work.values[i] = b.b2 * ug.values[i] * ug.values[i];
      tf.to_spectral(work, q2);
      for (std::size_t i = 0; i < mu_nl.size(); ++i) mu_nl.data()[i] += q2.data()[i];
    }
    double grad_energy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double c = u.data()[i];
      grad_energy += rho[i] * c * c * weight[i];
    }
    energy = 0.5 * p.alpha * grad_energy + poly * d.volume() / static_cast<double>(ug.size());
  }

  void build_mu(const SpectralField& u, SpectralField& out, bool include_nl = true) {
    if (out.modes() != modes) out = SpectralField(modes);
    for (std::size_t i = 0; i < u.size(); ++i)
      out.data()[i] = (p.alpha * rho[i] + b.b1) * u.data()[i] + (include_nl ? mu_nl.data()[i] : 0.0);
  }

  double mobility_at(double v) const {
    return cfg.model == RhsModel::Divergence ? p.mobility.at_deviation(p.ubar, v)
                                             : p.mobility.truncated(v);
  }

  // G = full right-hand side minus lambda u. Requires evaluate(u) first.
  void explicit_part(const SpectralField& u, SpectralField& out) {
    if (out.modes() != modes) out = SpectralField(modes);
    const double h0 = p.mobility.h0;
    for (std::size_t i = 0; i < u.size(); ++i) out.data()[i] = -h0 * rho[i] * mu_nl.data()[i];
    if (!variable_h) return;
    if (flux.shape != ug.shape) flux = RealGrid(ug.shape);
    if (cfg.model == RhsModel::Divergence) {
      build_mu(u, mu);
      if (hgrid.shape != ug.shape) hgrid = RealGrid(ug.shape);
      for (std::size_t i = 0; i < ug.size(); ++i) hgrid.values[i] = mobility_at(ug.values[i]) - h0;
      for (int a = 0; a < 3; ++a) {
        tf.gradient_to_grid(mu, a, grad);
        for (std::size_t i = 0; i < ug.size(); ++i) flux.values[i] = hgrid.values[i] * grad.values[i];
        tf.add_divergence(flux, a, out);
      }
    } else {
      // H1 u grad(mu_lin + P b2 u^2) + H2/2 u^2 grad mu_lin
      const double h1 = p.mobility.h1, h2 = p.mobility.h2;
      build_mu(u, mu, false);
      if (scratch.modes() != modes) scratch = SpectralField(modes);
      for (std::size_t i = 0; i < u.size(); ++i) scratch.data()[i] = mu.data()[i] + q2.data()[i];
      for (int a = 0; a < 3; ++a) {
        std::fill(flux.values.begin(), flux.values.end(), 0.0);
        if (h1 != 0.0) {
          tf.gradient_to_grid(scratch, a, grad);
          for (std::size_t i = 0; i < ug.size(); ++i) flux.values[i] = h1 * ug.values[i] * grad.values[i];
        }
        if (h2 != 0.0) {
          tf.gradient_to_grid(mu, a, grad);
          for (std::size_t i = 0; i < ug.size(); ++i)
            flux.values[i] += 0.5 * h2 * ug.values[i] * ug.values[i] * grad.values[i];
        }
        tf.add_divergence(flux, a, out);
      }
    }
  }

  void step(SimState& s) {
    check(s);
    evaluate(s.u);
    explicit_part(s.u, G);
    const double dt = cfg.dt;
    SpectralField next(modes);
    auto& un = next.data();
    const auto& u = s.u.data();
    for (std::size_t i = 0; i < u.size(); ++i) G.data()[i] += shift[i] * u[i];
    const double* g = G.data().data();
    const double* gp = G_prev.data().data();
    if (cfg.scheme == Scheme::IMEX1) {
      for (std::size_t i = 0; i < u.size(); ++i)
        un[i] = (u[i] + dt * g[i]) / (1.0 - dt * (lambda[i] - shift[i]));
    } else {
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double lt = lambda[i] - shift[i];
        const double ex = has_prev ? 1.5 * g[i] - 0.5 * gp[i] : g[i];
        un[i] = ((1.0 + 0.5 * dt * lt) * u[i] + dt * ex) / (1.0 - 0.5 * dt * lt);
      }
    }
    un[0] = 0.0;
    for (double v : un)
      if (!std::isfinite(v))
        throw StepRejected("non-finite coefficient after step at t = " + std::to_string(s.t), s.t);
    std::swap(G, G_prev);
    has_prev = true;
    s.u = std::move(next);
    s.t += dt;
  }

  double dissipation(const SimState& s) {
    check(s);
    evaluate(s.u);
    build_mu(s.u, mu);
    if (hgrid.shape != ug.shape) hgrid = RealGrid(ug.shape);
    for (std::size_t i = 0; i < ug.size(); ++i)
      hgrid.values[i] = p.mobility.at_deviation(p.ubar, ug.values[i]);
    if (work.shape != ug.shape) work = RealGrid(ug.shape);
    std::fill(work.values.begin(), work.values.end(), 0.0);
    for (int a = 0; a < 3; ++a) {
      tf.gradient_to_grid(mu, a, grad);
      for (std::size_t i = 0; i < ug.size(); ++i)
        work.values[i] += hgrid.values[i] * grad.values[i] * grad.values[i];
    }
    return -tf.integrate(work);
  }
};

Stepper::Stepper(const SimState& s, const StepConfig& c) : impl_(std::make_unique<Impl>(s, c)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::step(SimState& s) { impl_->step(s); }
void Stepper::reset_history() { impl_->has_prev = false; }
double Stepper::last_energy() const { return impl_->energy; }
double Stepper::last_mass() const { return impl_->mass; }
const StepConfig& Stepper::config() const { return impl_->cfg; }

double Stepper::free_energy(const SimState& s) {
  impl_->check(s);
  impl_->evaluate(s.u);
  return impl_->energy;
}

SpectralField Stepper::chemical_potential(const SimState& s) {
  impl_->check(s);
  impl_->evaluate(s.u);
  SpectralField out;
  impl_->build_mu(s.u, out);
  return out;
}

double Stepper::dissipation(const SimState& s) { return impl_->dissipation(s); }

SpectralField Stepper::rhs(const SimState& s) {
  auto& m = *impl_;
  m.check(s);
  m.evaluate(s.u);
  SpectralField out;
  m.explicit_part(s.u, out);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += m.lambda[i] * s.u.data()[i];
  out.data()[0] = 0.0;
  return out;
}

namespace {
StepConfig matched(const SimState& s, StepConfig c) {
  c.grid = s.u.modes();
  return c;
}
}  // namespace

SimState step(const SimState& s, const StepConfig& c) {
  Stepper st(s, c);
  SimState out = s;
  st.step(out);
  return out;
}

double free_energy(const SimState& s, const StepConfig& c) {
  return Stepper(s, matched(s, c)).free_energy(s);
}

SpectralField chemical_potential(const SimState& s, const StepConfig& c) {
  return Stepper(s, matched(s, c)).chemical_potential(s);
}

double dissipation(const SimState& s, const StepConfig& c) {
  return Stepper(s, matched(s, c)).dissipation(s);
}

std::vector<ModeIndex> diagnostic_modes(const PhysicalParams& p, const DomainSpec& d) {
  try {
    return critical_set(p, d).modes;
  } catch (const ModelError&) {
    std::vector<ModeIndex> out{{1, 0, 0}};
    if (d.multiplicity() >= 2) out.emplace_back(0, 1, 0);
    if (d.multiplicity() >= 3) out.emplace_back(0, 0, 1);
    return out;
  }
}

SimulationResult simulate(const SimState& s0, const StepConfig& c, const SimulateOptions& opt) {
  Stepper st(s0, c);
  SimulationResult r;
  r.critical_modes = diagnostic_modes(s0.params, s0.domain);
  SimState s = s0;

  auto record = [&](const SimState& at) {
    Diagnostics dg;
    dg.t = at.t;
    dg.energy_dissipation = st.dissipation(at);
    dg.energy = st.last_energy();
    dg.mass = st.last_mass();
    for (const auto& K : r.critical_modes) dg.mode_amplitudes.push_back(at.u.at(K));
    r.series.push_back(std::move(dg));
    if (opt.keep_snapshots) r.snapshots.push_back(at.u);
  };

  const long n_steps = std::max(0L, static_cast<long>(std::ceil((opt.t_end - s0.t) / c.dt - 1e-9)));
  const long every = std::max(1L, opt.record_every);
  record(s);
  std::optional<double> prev_energy;
  for (long n = 0; n < n_steps; ++n) {
    SpectralField before = s.u;
    st.step(s);
    ++r.steps;
    r.max_abs_mass = std::max(r.max_abs_mass, std::abs(st.last_mass()));
    const double e = st.last_energy();
    if (prev_energy) {
      const double rise = (e - *prev_energy) / (1.0 + std::abs(*prev_energy));
      r.max_energy_increase = std::max(r.max_energy_increase, rise);
      if (rise > opt.energy_tol) r.energy_monotone = false;
    }
    prev_energy = e;

    double du = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      const double x = s.u.data()[i] - before.data()[i];
      du += x * x;
    }
    r.steady_residual = std::sqrt(du) / c.dt / (1.0 + s.u.coefficient_norm());
    r.converged = r.steady_residual < opt.steady_tol;
    const bool last = n + 1 == n_steps || (r.converged && opt.stop_at_steady);
    if ((n + 1) % every == 0 || last) {
      record(s);
      const double rise = (r.series.back().energy - e) / (1.0 + std::abs(e));
      r.max_abs_mass = std::max(r.max_abs_mass, std::abs(r.series.back().mass));
      if (last) {
        r.max_energy_increase = std::max(r.max_energy_increase, rise);
        if (rise > opt.energy_tol) r.energy_monotone = false;
      }
    }
    if (r.converged && opt.stop_at_steady) break;
  }
  for (const auto& K : r.critical_modes) r.terminal_amplitudes.push_back(s.u.at(K));
  r.final_state = std::move(s);
  return r;
}

SpectralField random_field(GridShape modes, double amplitude, int band, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  SpectralField f(modes);
  for (int i = 0; i <= std::min(band, modes[0] - 1); ++i)
    for (int j = 0; j <= std::min(band, modes[1] - 1); ++j)
      for (int k = 0; k <= std::min(band, modes[2] - 1); ++k)
        if (i || j || k) f(i, j, k) = dist(gen);
  return f;
}

SpectralField mode_field(GridShape modes, const std::vector<std::pair<ModeIndex, double>>& terms) {
  SpectralField f(modes);
  for (const auto& [K, a] : terms) f.set(K, f.at(K) + a);
  return f;
}

ShadowingResult shadow_reduced(const PhysicalParams& p, const DomainSpec& d, double T,
                               const std::vector<double>& y0, const StepConfig& c,
                               double horizon) {
  const std::vector<ModeIndex> modes = diagnostic_modes(p, d);
  if (y0.size() != modes.size())
    throw ModelError("initial data needs one value per critical mode");
  ShadowingResult r;
  const double beta = growth_rate({1, 0, 0}, T, p, d);
  r.horizon = horizon > 0.0 ? horizon : 1.0 / std::abs(beta);

  for (const Equilibrium& e : enumerate_equilibria(p, d, T))
    for (double v : e.y_star) r.reference_amplitude = std::max(r.reference_amplitude, std::abs(v));

  SimState s;
  s.T = T;
  s.params = p;
  s.domain = d;
  std::vector<std::pair<ModeIndex, double>> terms;
  for (std::size_t j = 0; j < modes.size(); ++j) terms.emplace_back(modes[j], y0[j]);
  s.u = mode_field(c.grid, terms);
  SimulateOptions opt;
  opt.t_end = r.horizon;
  opt.record_every = 1;
  opt.stop_at_steady = false;
  const SimulationResult pde = simulate(s, c, opt);

  ReducedIntegrationOptions ro;
  ro.dt = c.dt;
  ro.steps = pde.steps;
  ro.record_every = 1;
  const ReducedIntegration red = integrate_reduced({y0, T}, p, d, ro);
  const std::size_t n = std::min(pde.series.size(), red.trajectory.size());
  for (std::size_t i = 0; i < n; ++i) {
    r.t.push_back(pde.series[i].t);
    r.pde.push_back(pde.series[i].mode_amplitudes);
    r.reduced.push_back(red.trajectory[i].y);
    for (std::size_t j = 0; j < modes.size(); ++j)
      r.max_deviation = std::max(r.max_deviation, std::abs(r.pde.back()[j] - r.reduced.back()[j]));
  }
  r.relative_deviation = r.reference_amplitude > 0.0 ? r.max_deviation / r.reference_amplitude
                                                     : std::numeric_limits<double>::infinity();
  return r;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

SweepResult amplitude_sweep(const SimState& base, const std::vector<double>& temperatures,
                            const StepConfig& c, const SimulateOptions& opt, int threads) {
  SweepResult out;
  out.points.resize(temperatures.size());
  const double Tc = critical_temperature(base.params, base.domain);
  const ModeIndex lead = diagnostic_modes(base.params, base.domain).front();

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(temperatures.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < temperatures.size(); i = next++) {
      try {
        SimState s = base;
        s.T = temperatures[i];
        const SimulationResult r = simulate(s, c, opt);
        SweepPoint& pt = out.points[i];
        pt.T = s.T;
        pt.amplitude = std::abs(r.final_state.u.at(lead));
        pt.steps = r.steps;
        pt.converged = r.converged;
        pt.energy_monotone = r.energy_monotone;
        pt.max_abs_mass = r.max_abs_mass;
        pt.max_energy_increase = r.max_energy_increase;
        try {
          pt.predicted = bifurcated_amplitude(base.params, base.domain, s.T);
        } catch (const ModelError&) {
          pt.predicted = std::numeric_limits<double>::quiet_NaN();
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(1, temperatures.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> lx, ly;
  for (const auto& pt : out.points)
    if (pt.T < Tc && pt.amplitude > 0.0) {
      lx.push_back(std::log(Tc - pt.T));
      ly.push_back(std::log(pt.amplitude));
    }
  std::tie(out.slope, out.intercept) = fit_line(lx, ly);
  return out;
}

}  // namespace cht
