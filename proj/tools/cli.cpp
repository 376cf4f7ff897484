#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cht/classifier.hpp"
#include "cht/linstab.hpp"
#include "cht/manifold.hpp"
#include "cht/simulator.hpp"

namespace cht::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  os << std::setprecision(17);
  return os;
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
  auto os = open_out(dir, name);
  os << j.dump(2) << '\n';
}

std::string mode_column(const std::string& prefix, const ModeIndex& K) {
  return prefix + "_" + std::to_string(K[0]) + "_" + std::to_string(K[1]) + "_" + std::to_string(K[2]);
}

json header(const RunConfig& cfg, const char* command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  const auto& p = cfg.physical;
  j["params"] = {{"R", p.R},
                 {"gamma", p.gamma},
                 {"alpha", p.alpha},
                 {"ubar", p.ubar},
                 {"H0", p.mobility.h0},
                 {"H1", p.mobility.h1},
                 {"H2", p.mobility.h2},
                 {"profile", p.mobility.profile ? json(p.mobility.profile->describe()) : json()},
                 {"L", cfg.domain.lengths()},
                 {"case", std::string(to_string(cfg.domain.domain_case()))}};
  if (cfg.T) j["params"]["T"] = *cfg.T;
  return j;
}

json step_json(const StepConfig& c) {
  return {{"dt", c.dt},
          {"scheme", std::string(to_string(c.scheme))},
          {"model", std::string(to_string(c.model))},
          {"grid", c.grid},
          {"dealias", c.dealias},
          {"stabilization", c.stabilization},
          {"diffusive_stabilization", c.diffusive_stabilization}};
}

SimState initial_state(const RunConfig& cfg, double T) {
  SimState s;
  s.T = T;
  s.params = cfg.physical;
  s.domain = cfg.domain;
  const auto& sim = cfg.simulate;
  s.u = sim.init == InitKind::Random
            ? random_field(sim.step.grid, sim.amplitude, sim.band, cfg.seed)
            : mode_field(sim.step.grid, sim.modes);
  return s;
}

}  // namespace

int cmd_classify(const RunConfig& cfg, bool quiet, std::ostream& out) {
  const TransitionReport report = classify_transition(cfg.physical, cfg.domain);
  const CensusCheck check = census_check(report, cfg.physical, cfg.domain);

  json j = header(cfg, "classify");
  j["report"] = to_json(report);
  j["census_check"] = {{"matches", check.matches()},
                       {"observed", to_json(check.observed)},
                       {"mismatches", check.mismatches}};
  write_json(cfg.output_dir, "report.json", j);
  const std::string text = render_text(report);
  open_out(cfg.output_dir, "report.txt") << text;

  const PesReport pes = verify_pes(cfg.physical, cfg.domain);
  json pj = header(cfg, "classify");
  pj["Tc"] = pes.Tc;
  pj["passed"] = pes.passed();
  pj["margin"] = pes.margin;
  pj["margin_mode"] = pes.margin_mode.str();
  pj["tail_certified"] = pes.tail_certified;
  json viol = json::array();
  for (const auto& v : pes.violations)
    viol.push_back({{"mode", v.K.str()}, {"T", v.T}, {"beta", v.beta}, {"reason", v.reason}});
  pj["violations"] = viol;
  write_json(cfg.output_dir, "pes.json", pj);

  if (!quiet) {
    out << text;
    if (!check.matches())
      for (const auto& m : check.mismatches) out << "  census mismatch: " << m << "\n";
  }
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, bool quiet, std::ostream& out) {
  const SimState s0 = initial_state(cfg, cfg.temperature());
  const auto& sim = cfg.simulate;
  const SimulationResult r = simulate(s0, sim.step, sim.options);

  auto csv = open_out(cfg.output_dir, "trajectory.csv");
  csv << "t,mass,energy,dissipation";
  for (const auto& K : r.critical_modes) csv << ',' << mode_column("y", K);
  csv << '\n';
  for (const auto& dg : r.series) {
    csv << dg.t << ',' << dg.mass << ',' << dg.energy << ',' << dg.energy_dissipation;
    for (double y : dg.mode_amplitudes) csv << ',' << y;
    csv << '\n';
  }
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "field_" << std::setw(6) << std::setfill('0') << i << ".bin";
    fs::create_directories(cfg.output_dir);
    std::ofstream bin(cfg.output_dir / name.str(), std::ios::binary);
    write_grid_binary(bin, inverse_transform(r.snapshots[i], cfg.domain));
  }

  json j = header(cfg, "simulate");
  j["step"] = step_json(sim.step);
  j["init"] = sim.init == InitKind::Random ? "random" : "modes";
  j["steps"] = r.steps;
  j["t_final"] = r.final_state.t;
  j["converged"] = r.converged;
  j["steady_residual"] = r.steady_residual;
  j["max_abs_mass"] = r.max_abs_mass;
  j["energy_monotone"] = r.energy_monotone;
  j["max_energy_increase"] = r.max_energy_increase;
  json modes = json::array();
  for (std::size_t i = 0; i < r.critical_modes.size(); ++i)
    modes.push_back({{"mode", r.critical_modes[i].str()}, {"amplitude", r.terminal_amplitudes[i]}});
  j["terminal_amplitudes"] = modes;
  write_json(cfg.output_dir, "summary.json", j);

  if (!quiet) {
    out << "simulated " << r.steps << " steps to t = " << r.final_state.t
        << (r.converged ? " (steady)" : "") << "\n";
    for (std::size_t i = 0; i < r.critical_modes.size(); ++i)
      out << "  y" << r.critical_modes[i].str() << " = " << r.terminal_amplitudes[i] << "\n";
    out << "  max |mass| = " << r.max_abs_mass
        << ", energy monotone: " << (r.energy_monotone ? "yes" : "no") << "\n";
  }
  return kOk;
}

int cmd_reduce(const RunConfig& cfg, bool quiet, std::ostream& out) {
  const double T = cfg.temperature();
  const int m = cfg.domain.multiplicity();
  std::vector<double> y0 = cfg.reduce.y0;
  if (y0.empty()) y0.assign(m, 0.0);
  const ReducedIntegration r = integrate_reduced({y0, T}, cfg.physical, cfg.domain, cfg.reduce.options);
  const auto modes = diagnostic_modes(cfg.physical, cfg.domain);

  auto csv = open_out(cfg.output_dir, "reduced.csv");
  csv << 't';
  for (const auto& K : modes) csv << ',' << mode_column("y", K);
  csv << '\n';
  for (const auto& pt : r.trajectory) {
    csv << pt.t;
    for (double y : pt.y) csv << ',' << y;
    csv << '\n';
  }

  EquilibriumOptions eo;
  eo.sigma_at = cfg.reduce.options.sigma_at;
  json eq = json::array();
  for (const Equilibrium& e : enumerate_equilibria(cfg.physical, cfg.domain, T, eo))
    eq.push_back({{"y", e.y_star},
                  {"kind", std::string(to_string(e.kind))},
                  {"full_system_kind", std::string(to_string(e.full_system_kind()))},
                  {"eigenvalues", e.jacobian_eigs}});
  json j = header(cfg, "reduce");
  j["y0"] = y0;
  j["dt"] = cfg.reduce.options.dt;
  j["sigma_at"] = cfg.reduce.options.sigma_at == SigmaAt::Ambient ? "ambient" : "critical";
  j["escaped"] = r.escaped;
  j["escape_time"] = r.escaped ? json(r.escape_time) : json();
  j["final"] = r.trajectory.back().y;
  j["equilibria"] = eq;
  write_json(cfg.output_dir, "reduce.json", j);

  if (!quiet) {
    out << "reduced system, m = " << m << ", " << r.trajectory.size() << " samples";
    if (r.escaped) out << ", escaped at t = " << r.escape_time;
    out << "\n  final y =";
    for (double y : r.trajectory.back().y) out << ' ' << y;
    out << "\n  " << eq.size() << " bifurcated equilibria at T = " << T << "\n";
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, bool quiet, std::ostream& out) {
  const double Tc = critical_temperature(cfg.physical, cfg.domain);
  std::vector<double> temps = cfg.sweep.temperatures;
  if (temps.empty())
    for (double e : cfg.sweep.epsilons) temps.push_back(Tc * (1.0 - e));
  const TransitionReport report = classify_transition(cfg.physical, cfg.domain);

  const SimState base = initial_state(cfg, temps.empty() ? Tc : temps.front());
  const ModeIndex lead = diagnostic_modes(cfg.physical, cfg.domain).front();
  const double initial = std::abs(base.u.at(lead));
  const SweepResult r = amplitude_sweep(base, temps, cfg.simulate.step, cfg.simulate.options,
                                        cfg.sweep.threads);

  auto csv = open_out(cfg.output_dir, "sweep.csv");
  csv << "T,epsilon,amplitude,predicted,grew,consistent,steps,converged,energy_monotone,max_abs_mass\n";
  bool all_consistent = true;
  json pts = json::array();
  for (const auto& pt : r.points) {
    // Linear instability below Tc: small data grows there and decays above.
    const bool grew = pt.amplitude > initial;
    const bool consistent = grew == (pt.T < Tc);
    all_consistent = all_consistent && consistent;
    csv << pt.T << ',' << 1.0 - pt.T / Tc << ',' << pt.amplitude << ',' << pt.predicted << ','
        << grew << ',' << consistent << ',' << pt.steps << ',' << pt.converged << ','
        << pt.energy_monotone << ',' << pt.max_abs_mass << '\n';
    pts.push_back({{"T", pt.T},
                   {"amplitude", pt.amplitude},
                   {"predicted", std::isfinite(pt.predicted) ? json(pt.predicted) : json()},
                   {"consistent", consistent},
                   {"converged", pt.converged}});
  }
  json j = header(cfg, "sweep");
  j["Tc"] = Tc;
  j["type"] = std::string(to_string(report.type));
  j["step"] = step_json(cfg.simulate.step);
  j["slope"] = std::isfinite(r.slope) ? json(r.slope) : json();
  j["intercept"] = std::isfinite(r.intercept) ? json(r.intercept) : json();
  j["consistent_with_classifier"] = all_consistent;
  j["points"] = pts;
  write_json(cfg.output_dir, "sweep.json", j);

  if (!quiet) {
    out << "swept " << r.points.size() << " temperatures, Tc = " << Tc << "\n";
    out << "  log-log slope = " << r.slope << "\n";
    out << "  classifier consistency: " << (all_consistent ? "yes" : "no") << "\n";
  }
  return kOk;
}

int cmd_validate(const RunConfig& cfg, bool quiet, std::ostream& out) {
  const double T = cfg.temperature();
  const int m = cfg.domain.multiplicity();
  std::vector<double> y0 = cfg.validate.y0;
  if (y0.empty()) {
    const std::vector<double> defaults{0.05, 0.03, 0.02};
    y0.assign(defaults.begin(), defaults.begin() + m);
  }
  StepConfig c = cfg.simulate.step;
  c.dt = cfg.validate.dt;
  const ShadowingResult r =
      shadow_reduced(cfg.physical, cfg.domain, T, y0, c, cfg.validate.horizon.value_or(0.0));
  const auto modes = diagnostic_modes(cfg.physical, cfg.domain);

  auto csv = open_out(cfg.output_dir, "validate.csv");
  csv << 't';
  for (const auto& K : modes) csv << ',' << mode_column("pde", K);
  for (const auto& K : modes) csv << ',' << mode_column("reduced", K);
  csv << '\n';
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    csv << r.t[i];
    for (double y : r.pde[i]) csv << ',' << y;
    for (double y : r.reduced[i]) csv << ',' << y;
    csv << '\n';
  }
  json j = header(cfg, "validate");
  j["y0"] = y0;
  j["step"] = step_json(c);
  j["horizon"] = r.horizon;
  j["reference_amplitude"] = r.reference_amplitude;
  j["max_deviation"] = r.max_deviation;
  j["relative_deviation"] = r.relative_deviation;
  write_json(cfg.output_dir, "validate.json", j);

  if (!quiet)
    out << "PDE vs reduced system over t in [0, " << r.horizon << "]: max deviation "
        << r.max_deviation << " (" << 100.0 * r.relative_deviation
        << "% of the bifurcated amplitude " << r.reference_amplitude << ")\n";
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cahn-Hilliard dynamic transitions with nonlinear mobility", "cht"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  bool quiet = false;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, bool, std::ostream&);
  };
  const Sub subs[] = {
      {"classify", "Critical temperature and transition type", cmd_classify},
      {"simulate", "Integrate the PDE and record diagnostics", cmd_simulate},
      {"reduce", "Integrate the reduced centre-manifold system", cmd_reduce},
      {"sweep", "Terminal amplitude against temperature", cmd_sweep},
      {"validate", "Compare PDE mode projections with the reduced system", cmd_validate},
  };
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "Config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "Random seed (overrides [output] seed)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", quiet, "Suppress the console summary");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const Sub* chosen = nullptr;
  for (const Sub& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    return chosen->fn(cfg, quiet, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const StepRejected& e) {
    err << "step rejected: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace cht::cli
