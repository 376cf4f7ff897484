#include "cht/manifold.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace cht {

namespace {

void check_dimension(const std::vector<double>& y, const DomainSpec& d) {
  if (static_cast<int>(y.size()) != d.multiplicity())
    throw ModelError("reduced state has dimension " + std::to_string(y.size()) +
                     " but the critical set has " + std::to_string(d.multiplicity()) +
                     " modes");
}

// All critical modes share rho_J = pi^2 / L^2 and hence one growth rate.
double critical_rate(double T, const PhysicalParams& p, const DomainSpec& d) {
  return growth_rate(ModeIndex{1, 0, 0}, T, p, d);
}

std::pair<double, double> sigmas_for(double T, const PhysicalParams& p, const DomainSpec& d,
                                     SigmaAt at) {
  return cubic_sigmas(p, d, at == SigmaAt::Critical ? critical_temperature(p, d) : T);
}

Eigen::MatrixXd jacobian_matrix(const std::vector<double>& y, double beta, double c,
                                double s1, double s2) {
  const int m = static_cast<int>(y.size());
  Eigen::MatrixXd J(m, m);
  double total = 0.0;
  for (double v : y) total += v * v;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        const double others = total - y[i] * y[i];
        J(i, i) = beta - c * (3.0 * s1 * y[i] * y[i] + s2 * others);
      } else {
        J(i, j) = -2.0 * c * s2 * y[i] * y[j];
      }
    }
  return J;
}

std::vector<double> field(const std::vector<double>& y, double beta, double c, double s1,
                          double s2) {
  double total = 0.0;
  for (double v : y) total += v * v;
  std::vector<double> f(y.size());
  for (size_t j = 0; j < y.size(); ++j) {
    const double others = total - y[j] * y[j];
    f[j] = beta * y[j] - c * y[j] * (s1 * y[j] * y[j] + s2 * others);
  }
  return f;
}

}  // namespace

std::vector<ModeIndex> manifold_support(const CriticalSet& P) {
  std::set<ModeIndex> s;
  for (const auto& J : P.modes)
    for (const auto& L : P.modes) s.insert(J + L);
  return {s.begin(), s.end()};
}

ManifoldCoeffs cm_coefficients(const ReducedState& y, const PhysicalParams& p,
                               const DomainSpec& d) {
  check_dimension(y.y, d);
  const CriticalSet P = critical_set(p, d);
  const double Tc = critical_temperature(p, d);
  const double b2 = derive_coefficients(p, y.T).b2;
  ManifoldCoeffs out;
  out.far_from_critical = std::abs(y.T - Tc) / Tc >= 0.1;
  const int m = P.m();
  for (int j = 0; j < m; ++j) {
    const ModeIndex& J = P.modes[j];
    const double rho = laplacian_eigenvalue(J, d);
    out.phi[J + J] = -b2 * y.y[j] * y.y[j] / (6.0 * p.alpha * rho);
    for (int l = j + 1; l < m; ++l)
      out.phi[J + P.modes[l]] = -2.0 * b2 * y.y[j] * y.y[l] / (p.alpha * rho);
  }
  return out;
}

ManifoldCoeffs cm_quotient(const ReducedState& y, const PhysicalParams& p,
                           const DomainSpec& d) {
  check_dimension(y.y, d);
  const CriticalSet P = critical_set(p, d);
  const double Tc = critical_temperature(p, d);
  const double b2 = derive_coefficients(p, y.T).b2;
  ManifoldCoeffs out;
  out.far_from_critical = std::abs(y.T - Tc) / Tc >= 0.1;
  const double negligible = 1e-13 * d.volume();
  for (const ModeIndex& K : scan_modes(2)) {
    if (std::find(P.modes.begin(), P.modes.end(), K) != P.modes.end()) continue;
    double sum = 0.0;
    bool touched = false;
    for (int j = 0; j < P.m(); ++j)
      for (int l = 0; l < P.m(); ++l) {
        const double tp = triple_product(P.modes[j], P.modes[l], K, d);
        if (std::abs(tp) <= negligible) continue;
        touched = true;
        sum += y.y[j] * y.y[l] * tp;
      }
    if (!touched) continue;
    const double rho = laplacian_eigenvalue(K, d);
    out.phi[K] = p.mobility.h0 * b2 * rho * sum /
                 (growth_rate(K, y.T, p, d) * mode_l2_norm_sq(K, d));
  }
  return out;
}

double cubic_prefactor(const PhysicalParams& p, const DomainSpec& d) {
  return p.mobility.h0 * std::numbers::pi * std::numbers::pi / (2.0 * d.L() * d.L());
}

std::vector<double> reduced_vector_field(const ReducedState& y, const PhysicalParams& p,
                                         const DomainSpec& d, SigmaAt sigma_at) {
  check_dimension(y.y, d);
  const auto [s1, s2] = sigmas_for(y.T, p, d, sigma_at);
  return field(y.y, critical_rate(y.T, p, d), cubic_prefactor(p, d), s1, s2);
}

std::vector<double> critical_vector_field(const std::vector<double>& y,
                                          const PhysicalParams& p, const DomainSpec& d) {
  check_dimension(y, d);
  const auto [s1, s2] = cubic_sigmas(p, d, critical_temperature(p, d));
  return field(y, 0.0, cubic_prefactor(p, d), s1, s2);
}

std::vector<double> reduced_jacobian(const ReducedState& y, const PhysicalParams& p,
                                     const DomainSpec& d, SigmaAt sigma_at) {
  check_dimension(y.y, d);
  const auto [s1, s2] = sigmas_for(y.T, p, d, sigma_at);
  const Eigen::MatrixXd J =
      jacobian_matrix(y.y, critical_rate(y.T, p, d), cubic_prefactor(p, d), s1, s2);
  std::vector<double> out(J.size());
  for (int i = 0; i < J.rows(); ++i)
    for (int j = 0; j < J.cols(); ++j) out[i * J.cols() + j] = J(i, j);
  return out;
}

double reduced_potential(const ReducedState& y, const PhysicalParams& p,
                         const DomainSpec& d, SigmaAt sigma_at) {
  check_dimension(y.y, d);
  const auto [s1, s2] = sigmas_for(y.T, p, d, sigma_at);
  const double beta = critical_rate(y.T, p, d);
  const double c = cubic_prefactor(p, d);
  double quad = 0.0, quart = 0.0, cross = 0.0;
  for (size_t j = 0; j < y.y.size(); ++j) {
    const double q = y.y[j] * y.y[j];
    quad += q;
    quart += q * q;
    for (size_t l = j + 1; l < y.y.size(); ++l) cross += q * y.y[l] * y.y[l];
  }
  return -0.5 * beta * quad + c * (0.25 * s1 * quart + 0.5 * s2 * cross);
}

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Attractor: return "attractor";
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::Repeller: return "repeller";
    case EquilibriumKind::Degenerate: return "degenerate";
  }
  return "?";
}

EquilibriumKind Equilibrium::full_system_kind() const {
  return kind == EquilibriumKind::Repeller ? EquilibriumKind::Saddle : kind;
}

std::vector<Equilibrium> enumerate_equilibria(const PhysicalParams& p, const DomainSpec& d,
                                              double T, const EquilibriumOptions& opt) {
  const int m = d.multiplicity();
  const double beta = critical_rate(T, p, d);
  const double c = cubic_prefactor(p, d);
  const auto [s1, s2] = sigmas_for(T, p, d, opt.sigma_at);
  const double a1 = c * s1, a2 = c * s2;

  std::vector<Equilibrium> out;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const int k = static_cast<int>(idx.size());
    // Equal squares on the support: (a1 + (k - 1) a2) q = beta.
    const double denom = a1 + (k - 1) * a2;
    if (denom == 0.0) continue;
    const double q = beta / denom;
    if (!(q > 0.0)) continue;
    const double amp = std::sqrt(q);
    for (unsigned signs = 0; signs < (1u << k); ++signs) {
      Equilibrium e;
      e.T = T;
      e.support = k;
      e.y_star.assign(m, 0.0);
      for (int i = 0; i < k; ++i) e.y_star[idx[i]] = (signs & (1u << i)) ? -amp : amp;
      const auto f = field(e.y_star, beta, c, s1, s2);
      for (double v : f) e.residual = std::max(e.residual, std::abs(v));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          jacobian_matrix(e.y_star, beta, c, s1, s2), Eigen::EigenvaluesOnly);
      e.jacobian_eigs.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
      const double tol = opt.degeneracy_tol * std::abs(beta);
      bool any_zero = false, any_pos = false, any_neg = false;
      for (double ev : e.jacobian_eigs) {
        if (std::abs(ev) <= tol)
          any_zero = true;
        else if (ev > 0)
          any_pos = true;
        else
          any_neg = true;
      }
      if (any_zero)
        e.kind = EquilibriumKind::Degenerate;
      else if (any_pos && any_neg)
        e.kind = EquilibriumKind::Saddle;
      else
        e.kind = any_pos ? EquilibriumKind::Repeller : EquilibriumKind::Attractor;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<double> polish_equilibrium(std::vector<double> y, double T,
                                       const PhysicalParams& p, const DomainSpec& d,
                                       SigmaAt sigma_at, int max_iter) {
  check_dimension(y, d);
  const auto [s1, s2] = sigmas_for(T, p, d, sigma_at);
  const double beta = critical_rate(T, p, d);
  const double c = cubic_prefactor(p, d);
  const int m = static_cast<int>(y.size());
  for (int it = 0; it < max_iter; ++it) {
    const auto f = field(y, beta, c, s1, s2);
    Eigen::VectorXd rhs(m);
    for (int j = 0; j < m; ++j) rhs(j) = f[j];
    const Eigen::VectorXd step = jacobian_matrix(y, beta, c, s1, s2).fullPivLu().solve(rhs);
    double size = 0.0;
    for (int j = 0; j < m; ++j) {
      y[j] -= step(j);
      size = std::max(size, std::abs(step(j)));
    }
    if (size <= 1e-16 * (1.0 + std::sqrt(std::abs(beta)))) break;
  }
  return y;
}

std::vector<LineOrbit> straight_line_orbits(int m) {
  if (m < 1 || m > 3) throw ModelError("critical multiplicity must be 1, 2 or 3");
  std::vector<LineOrbit> out;
  auto add = [&](std::vector<double> v, std::string label) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
    out.push_back({std::move(v), std::move(label)});
  };
  for (int i = 0; i < m; ++i) {
    std::vector<double> v(m, 0.0);
    v[i] = 1.0;
    add(v, "axis y" + std::to_string(i + 1));
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (double s : {1.0, -1.0}) {
        std::vector<double> v(m, 0.0);
        v[i] = 1.0;
        v[j] = s;
        add(v, "y" + std::to_string(j + 1) + (s > 0 ? " = " : " = -") + "y" +
                   std::to_string(i + 1) + (m == 3 ? ", other = 0" : ""));
      }
  if (m == 3)
    for (double s2 : {1.0, -1.0})
      for (double s3 : {1.0, -1.0})
        add({1.0, s2, s3}, std::string("space diagonal (1,") + (s2 > 0 ? "+" : "-") + "1," +
                               (s3 > 0 ? "+" : "-") + "1)");
  return out;
}

std::vector<double> rk4_step(const std::vector<double>& y, double dt, double T,
                             const PhysicalParams& p, const DomainSpec& d, SigmaAt sigma_at) {
  check_dimension(y, d);
  const auto [s1, s2] = sigmas_for(T, p, d, sigma_at);
  const double beta = critical_rate(T, p, d);
  const double c = cubic_prefactor(p, d);
  const size_t m = y.size();
  auto axpy = [&](const std::vector<double>& k, double h) {
    std::vector<double> r(m);
    for (size_t i = 0; i < m; ++i) r[i] = y[i] + h * k[i];
    return r;
  };
  const auto k1 = field(y, beta, c, s1, s2);
  const auto k2 = field(axpy(k1, 0.5 * dt), beta, c, s1, s2);
  const auto k3 = field(axpy(k2, 0.5 * dt), beta, c, s1, s2);
  const auto k4 = field(axpy(k3, dt), beta, c, s1, s2);
  std::vector<double> out(m);
  for (size_t i = 0; i < m; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

ReducedIntegration integrate_reduced(const ReducedState& y0, const PhysicalParams& p,
                                     const DomainSpec& d,
                                     const ReducedIntegrationOptions& opt) {
  check_dimension(y0.y, d);
  if (!(opt.dt > 0.0)) throw ModelError("time step must be positive");
  ReducedIntegration out;
  std::vector<double> y = y0.y;
  out.trajectory.push_back({0.0, y});
  const long every = std::max(1L, opt.record_every);
  for (long n = 1; n <= opt.steps; ++n) {
    y = rk4_step(y, opt.dt, y0.T, p, d, opt.sigma_at);
    const double t = n * opt.dt;
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (!std::isfinite(norm) || norm > opt.escape_radius) {
      out.escaped = true;
      out.escape_time = t;
      if (std::isfinite(norm)) out.trajectory.push_back({t, y});
      break;
    }
    if (n % every == 0 || n == opt.steps) out.trajectory.push_back({t, y});
  }
  return out;
}

}  // namespace cht
