#include "cht/spectral.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace cht {

namespace {

constexpr double kPi = std::numbers::pi;

// 64 nodes integrate products of three cosines with k_i <= 8 (frequency 24
// on a half period) to round-off.
using Gauss = boost::math::quadrature::gauss<double, 64>;

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double axis_wavenumber(int k, double length) { return k * kPi / length; }

}  // namespace

std::string ModeIndex::str() const {
  std::ostringstream os;
  os << "(" << k[0] << "," << k[1] << "," << k[2] << ")";
  return os.str();
}

double laplacian_eigenvalue(const ModeIndex& K, const DomainSpec& d) {
  double rho = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double w = axis_wavenumber(K[i], d.length(i));
    rho += w * w;
  }
  return rho;
}

double eval_mode(const ModeIndex& K, const std::array<double, 3>& x,
                 const DomainSpec& d) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i) v *= std::cos(axis_wavenumber(K[i], d.length(i)) * x[i]);
  return v;
}

double mode_l2_norm_sq(const ModeIndex& K, const DomainSpec& d) {
  double v = d.volume();
  for (int i = 0; i < 3; ++i)
    if (K[i] != 0) v *= 0.5;
  return v;
}

double triple_product(const ModeIndex& J, const ModeIndex& L, const ModeIndex& K,
                      const DomainSpec& d) {
  double v = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double len = d.length(i);
    const double a = axis_wavenumber(J[i], len), b = axis_wavenumber(L[i], len),
                 c = axis_wavenumber(K[i], len);
    v *= Gauss::integrate(
        [&](double x) { return std::cos(a * x) * std::cos(b * x) * std::cos(c * x); },
        0.0, len);
  }
  return v;
}

double grad_triple_product(const ModeIndex& J, const ModeIndex& L,
                           const ModeIndex& K, const DomainSpec& d) {
  std::array<double, 3> ccc{}, css{};
  for (int i = 0; i < 3; ++i) {
    const double len = d.length(i);
    const double a = axis_wavenumber(J[i], len), b = axis_wavenumber(L[i], len),
                 c = axis_wavenumber(K[i], len);
    ccc[i] = Gauss::integrate(
        [&](double x) { return std::cos(a * x) * std::cos(b * x) * std::cos(c * x); },
        0.0, len);
    css[i] = Gauss::integrate(
        [&](double x) { return std::cos(a * x) * (b * std::sin(b * x)) * (c * std::sin(c * x)); },
        0.0, len);
  }
  double total = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    double term = css[axis];
    for (int i = 0; i < 3; ++i)
      if (i != axis) term *= ccc[i];
    total += term;
  }
  return total;
}

// --- SpectralField ---------------------------------------------------------

SpectralField::SpectralField(GridShape modes)
    : modes_(modes),
      coeffs_(static_cast<std::size_t>(modes[0]) * modes[1] * modes[2], 0.0) {
  for (int n : modes)
    if (n < 1) throw ModelError("spectral truncation must be at least 1 per axis");
}

SpectralField SpectralField::single_mode(GridShape modes, const ModeIndex& K,
                                         double amplitude) {
  SpectralField f(modes);
  f.set(K, amplitude);
  return f;
}

bool SpectralField::contains(const ModeIndex& K) const {
  for (int i = 0; i < 3; ++i)
    if (K[i] < 0 || K[i] >= modes_[i]) return false;
  return true;
}

double SpectralField::at(const ModeIndex& K) const {
  return contains(K) ? coeffs_[index(K[0], K[1], K[2])] : 0.0;
}

void SpectralField::set(const ModeIndex& K, double value) {
  if (!contains(K)) throw ModelError("mode " + K.str() + " outside the truncation");
  if (K.is_zero() && value != 0.0)
    throw ModelError("the zero mode is fixed by the mean-zero constraint");
  coeffs_[index(K[0], K[1], K[2])] = value;
}

double SpectralField::coefficient_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

double SpectralField::l2_norm_sq(const DomainSpec& d) const {
  double s = 0.0;
  for (int i = 0; i < modes_[0]; ++i)
    for (int j = 0; j < modes_[1]; ++j)
      for (int k = 0; k < modes_[2]; ++k) {
        const double c = (*this)(i, j, k);
        if (c != 0.0) s += c * c * mode_l2_norm_sq({i, j, k}, d);
      }
  return s;
}

double SpectralField::evaluate(const std::array<double, 3>& x, const DomainSpec& d) const {
  std::array<std::vector<double>, 3> cosines;
  for (int a = 0; a < 3; ++a) {
    cosines[a].resize(modes_[a]);
    for (int k = 0; k < modes_[a]; ++k)
      cosines[a][k] = std::cos(axis_wavenumber(k, d.length(a)) * x[a]);
  }
  double v = 0.0;
  for (int i = 0; i < modes_[0]; ++i)
    for (int j = 0; j < modes_[1]; ++j)
      for (int k = 0; k < modes_[2]; ++k)
        v += (*this)(i, j, k) * cosines[0][i] * cosines[1][j] * cosines[2][k];
  return v;
}

// --- RealGrid --------------------------------------------------------------

RealGrid::RealGrid(GridShape s)
    : shape(s), values(static_cast<std::size_t>(s[0]) * s[1] * s[2], 0.0) {}

double RealGrid::mean() const {
  // Neumaier summation: the mean of a zero-mean field is a cancellation.
  double s = 0.0, c = 0.0;
  for (double v : values) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return values.empty() ? 0.0 : (s + c) / static_cast<double>(values.size());
}

double collocation_point(int j, int points, double length) {
  return (j + 0.5) * length / points;
}

// --- CosineTransform -------------------------------------------------------

struct CosineTransform::Impl {
  GridShape modes;
  GridShape grid;
  std::array<double, 3> lengths;
  double* in = nullptr;
  double* out = nullptr;
  std::size_t total = 0;
  fftw_plan cos_inverse = nullptr;
  fftw_plan cos_forward = nullptr;
  std::array<fftw_plan, 3> sin_inverse{};
  std::array<fftw_plan, 3> sin_forward{};

  Impl(GridShape n, GridShape m, const DomainSpec& d)
      : modes(n), grid(m), lengths(d.lengths()) {
    for (int a = 0; a < 3; ++a)
      if (m[a] < n[a] || n[a] < 1)
        throw ModelError("transform grid must have at least as many points as modes");
    total = static_cast<std::size_t>(m[0]) * m[1] * m[2];
    in = fftw_alloc_real(total);
    out = fftw_alloc_real(total);
    std::lock_guard lock(planner_mutex());
    auto plan = [&](fftw_r2r_kind k0, fftw_r2r_kind k1, fftw_r2r_kind k2) {
      return fftw_plan_r2r_3d(m[0], m[1], m[2], in, out, k0, k1, k2, FFTW_ESTIMATE);
    };
    cos_inverse = plan(FFTW_REDFT01, FFTW_REDFT01, FFTW_REDFT01);
    cos_forward = plan(FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10);
    for (int a = 0; a < 3; ++a) {
      std::array<fftw_r2r_kind, 3> inv{FFTW_REDFT01, FFTW_REDFT01, FFTW_REDFT01};
      std::array<fftw_r2r_kind, 3> fwd{FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10};
      inv[a] = FFTW_RODFT01;
      fwd[a] = FFTW_RODFT10;
      sin_inverse[a] = plan(inv[0], inv[1], inv[2]);
      sin_forward[a] = plan(fwd[0], fwd[1], fwd[2]);
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    for (fftw_plan p : {cos_inverse, cos_forward, sin_inverse[0], sin_inverse[1],
                        sin_inverse[2], sin_forward[0], sin_forward[1], sin_forward[2]})
      if (p) fftw_destroy_plan(p);
    fftw_free(in);
    fftw_free(out);
  }

  std::size_t grid_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * grid[1] + j) * grid[2] + k;
  }

  // Load coefficients into the input buffer for synthesis. `sine_axis` < 0
  // means all-cosine; otherwise coefficient index k along that axis is the
  // frequency of sin(k pi x / L), stored by FFTW at position k - 1.
  template <class Coef>
  void load(int sine_axis, Coef&& coef) {
    std::fill(in, in + total, 0.0);
    for (int i = 0; i < modes[0]; ++i)
      for (int j = 0; j < modes[1]; ++j)
        for (int k = 0; k < modes[2]; ++k) {
          const std::array<int, 3> kk{i, j, k};
          if (sine_axis >= 0 && kk[sine_axis] == 0) continue;
          double c = coef(i, j, k);
          if (c == 0.0) continue;
          std::array<int, 3> pos = kk;
          for (int a = 0; a < 3; ++a) {
            if (a == sine_axis) {
              c *= 0.5;
              pos[a] -= 1;
            } else if (kk[a] > 0) {
              c *= 0.5;
            }
          }
          in[grid_index(pos[0], pos[1], pos[2])] = c;
        }
  }

  // Scale factor turning raw FFTW analysis output into basis coefficients.
  double analysis_scale(const std::array<int, 3>& kk, int sine_axis) const {
    double s = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (a == sine_axis || kk[a] > 0)
        s /= grid[a];
      else
        s /= 2.0 * grid[a];
    }
    return s;
  }
};

CosineTransform::CosineTransform(GridShape modes, GridShape grid, const DomainSpec& d)
    : impl_(std::make_unique<Impl>(modes, grid, d)) {}
CosineTransform::~CosineTransform() = default;
CosineTransform::CosineTransform(CosineTransform&&) noexcept = default;
CosineTransform& CosineTransform::operator=(CosineTransform&&) noexcept = default;

const GridShape& CosineTransform::modes() const { return impl_->modes; }
const GridShape& CosineTransform::grid() const { return impl_->grid; }

void CosineTransform::to_grid(const SpectralField& f, RealGrid& out) {
  auto& m = *impl_;
  if (f.modes() != m.modes) throw ModelError("spectral field shape mismatch");
  m.load(-1, [&](int i, int j, int k) { return f(i, j, k); });
  if (out.shape != m.grid) out = RealGrid(m.grid);
  fftw_execute_r2r(m.cos_inverse, m.in, out.values.data());
}

void CosineTransform::to_spectral(const RealGrid& g, SpectralField& out) {
  auto& m = *impl_;
  if (g.shape != m.grid) throw ModelError("grid shape mismatch");
  std::copy(g.values.begin(), g.values.end(), m.in);
  fftw_execute_r2r(m.cos_forward, m.in, m.out);
  if (out.modes() != m.modes) out = SpectralField(m.modes);
  for (int i = 0; i < m.modes[0]; ++i)
    for (int j = 0; j < m.modes[1]; ++j)
      for (int k = 0; k < m.modes[2]; ++k)
        out(i, j, k) = m.out[m.grid_index(i, j, k)] * m.analysis_scale({i, j, k}, -1);
}

void CosineTransform::gradient_to_grid(const SpectralField& f, int axis, RealGrid& out) {
  auto& m = *impl_;
  if (f.modes() != m.modes) throw ModelError("spectral field shape mismatch");
  const double w = kPi / m.lengths[axis];
  m.load(axis, [&](int i, int j, int k) {
    const int ka = axis == 0 ? i : axis == 1 ? j : k;
    return -w * ka * f(i, j, k);
  });
  if (out.shape != m.grid) out = RealGrid(m.grid);
  fftw_execute_r2r(m.sin_inverse[axis], m.in, out.values.data());
}

void CosineTransform::add_divergence(const RealGrid& flux, int axis, SpectralField& acc,
                                     double scale) {
  auto& m = *impl_;
  if (flux.shape != m.grid) throw ModelError("grid shape mismatch");
  if (acc.modes() != m.modes) throw ModelError("spectral field shape mismatch");
  std::copy(flux.values.begin(), flux.values.end(), m.in);
  fftw_execute_r2r(m.sin_forward[axis], m.in, m.out);
  const double w = kPi / m.lengths[axis];
  for (int i = 0; i < m.modes[0]; ++i)
    for (int j = 0; j < m.modes[1]; ++j)
      for (int k = 0; k < m.modes[2]; ++k) {
        std::array<int, 3> kk{i, j, k};
        const int ka = kk[axis];
        if (ka == 0) continue;
        std::array<int, 3> pos = kk;
        pos[axis] -= 1;
        const double s = m.out[m.grid_index(pos[0], pos[1], pos[2])] * m.analysis_scale(kk, axis);
        acc(i, j, k) += scale * w * ka * s;
      }
}

double CosineTransform::integrate(const RealGrid& g) const {
  const auto& m = *impl_;
  double s = 0.0;
  for (double v : g.values) s += v;
  return s * m.lengths[0] * m.lengths[1] * m.lengths[2] / static_cast<double>(m.total);
}

SpectralField forward_transform(const RealGrid& grid, const DomainSpec& d) {
  CosineTransform t(grid.shape, grid.shape, d);
  SpectralField f(grid.shape);
  t.to_spectral(grid, f);
  f(0, 0, 0) = 0.0;
  return f;
}

RealGrid inverse_transform(const SpectralField& f, const DomainSpec& d) {
  return inverse_transform(f, d, f.modes());
}

RealGrid inverse_transform(const SpectralField& f, const DomainSpec& d, GridShape grid) {
  CosineTransform t(f.modes(), grid, d);
  RealGrid g(grid);
  t.to_grid(f, g);
  return g;
}

// --- serialisation ---------------------------------------------------------

namespace {
constexpr char kGridMagic[8] = {'C', 'H', 'T', 'G', 'R', 'I', 'D', '1'};
}

void write_grid_binary(std::ostream& os, const RealGrid& g) {
  os.write(kGridMagic, sizeof kGridMagic);
  for (int n : g.shape) {
    const std::uint64_t v = static_cast<std::uint64_t>(n);
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  os.write(reinterpret_cast<const char*>(g.values.data()),
           static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed to write grid");
}

RealGrid read_grid_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kGridMagic, sizeof magic) != 0)
    throw std::runtime_error("not a grid file");
  GridShape shape{};
  for (int& n : shape) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is || v == 0 || v > (1u << 20)) throw std::runtime_error("corrupt grid header");
    n = static_cast<int>(v);
  }
  RealGrid g(shape);
  is.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated grid file");
  return g;
}

void write_grid_csv(std::ostream& os, const RealGrid& g, const DomainSpec& d) {
  os << "x1,x2,x3,value\n";
  os.precision(17);
  for (int i = 0; i < g.shape[0]; ++i)
    for (int j = 0; j < g.shape[1]; ++j)
      for (int k = 0; k < g.shape[2]; ++k)
        os << collocation_point(i, g.shape[0], d.length(0)) << ','
           << collocation_point(j, g.shape[1], d.length(1)) << ','
           << collocation_point(k, g.shape[2], d.length(2)) << ',' << g(i, j, k) << '\n';
}

}  // namespace cht
