#pragma once

// Cosine eigenbasis of the Neumann Laplacian on a box.
//
// e_K(x) = prod_i cos(k_i pi x_i / L_i), -Lap e_K = rho_K e_K. Fields are
// stored as dense coefficient arrays over 0 <= k_i < N_i; the coefficient of
// e_K is <u, e_K> / <e_K, e_K>. Grids live on the cell-centred collocation
// points x_j = (j + 1/2) L / M, for which the type-II cosine transform is
// exact and orthogonal.

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cht/params.hpp"

namespace cht {

struct ModeIndex {
  std::array<int, 3> k{0, 0, 0};

  constexpr ModeIndex() = default;
  constexpr ModeIndex(int k1, int k2, int k3) : k{k1, k2, k3} {}

  constexpr int operator[](int i) const { return k[i]; }
  constexpr bool is_zero() const { return k[0] == 0 && k[1] == 0 && k[2] == 0; }
  constexpr ModeIndex operator+(const ModeIndex& o) const {
    return {k[0] + o.k[0], k[1] + o.k[1], k[2] + o.k[2]};
  }
  constexpr auto operator<=>(const ModeIndex&) const = default;

  std::string str() const;
};

using GridShape = std::array<int, 3>;

/// rho_K = sum_i k_i^2 pi^2 / L_i^2.
double laplacian_eigenvalue(const ModeIndex& K, const DomainSpec& d);

/// e_K at a point of the box.
double eval_mode(const ModeIndex& K, const std::array<double, 3>& x,
                 const DomainSpec& d);

/// <e_K, e_K> = V * prod_{k_i > 0} 1/2.
double mode_l2_norm_sq(const ModeIndex& K, const DomainSpec& d);

/// int_Omega e_J e_L e_K dx, by tensor Gauss-Legendre quadrature.
double triple_product(const ModeIndex& J, const ModeIndex& L, const ModeIndex& K,
                      const DomainSpec& d);

/// int_Omega e_J grad e_L . grad e_K dx, by tensor Gauss-Legendre quadrature.
double grad_triple_product(const ModeIndex& J, const ModeIndex& L,
                           const ModeIndex& K, const DomainSpec& d);

/// Coefficients over the cosine basis, truncated to k_i < N_i.
class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(GridShape modes);

  static SpectralField single_mode(GridShape modes, const ModeIndex& K,
                                   double amplitude = 1.0);

  const GridShape& modes() const { return modes_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  std::size_t index(int k1, int k2, int k3) const {
    return (static_cast<std::size_t>(k1) * modes_[1] + k2) * modes_[2] + k3;
  }
  double& operator()(int k1, int k2, int k3) { return coeffs_[index(k1, k2, k3)]; }
  double operator()(int k1, int k2, int k3) const { return coeffs_[index(k1, k2, k3)]; }

  bool contains(const ModeIndex& K) const;
  /// Zero for modes outside the truncation.
  double at(const ModeIndex& K) const;
  void set(const ModeIndex& K, double value);

  std::vector<double>& data() { return coeffs_; }
  const std::vector<double>& data() const { return coeffs_; }

  /// Plain l2 norm of the coefficient vector.
  double coefficient_norm() const;
  /// L2(Omega) norm squared, sum_K c_K^2 <e_K, e_K>.
  double l2_norm_sq(const DomainSpec& d) const;

  /// Point evaluation by direct summation.
  double evaluate(const std::array<double, 3>& x, const DomainSpec& d) const;

private:
  GridShape modes_{0, 0, 0};
  std::vector<double> coeffs_;
};

/// Real samples on the collocation grid, row-major with axis 0 slowest.
struct RealGrid {
  GridShape shape{0, 0, 0};
  std::vector<double> values;

  RealGrid() = default;
  explicit RealGrid(GridShape s);

  std::size_t size() const { return values.size(); }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k;
  }
  double& operator()(int i, int j, int k) { return values[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return values[index(i, j, k)]; }
  double mean() const;
};

/// x_j = (j + 1/2) L / M.
double collocation_point(int j, int points, double length);

/// Sample a function on the collocation grid.
template <class F>
RealGrid sample_grid(GridShape shape, const DomainSpec& d, F&& f) {
  RealGrid g(shape);
  for (int i = 0; i < shape[0]; ++i)
    for (int j = 0; j < shape[1]; ++j)
      for (int k = 0; k < shape[2]; ++k)
        g(i, j, k) = f(std::array<double, 3>{collocation_point(i, shape[0], d.length(0)),
                                             collocation_point(j, shape[1], d.length(1)),
                                             collocation_point(k, shape[2], d.length(2))});
  return g;
}

/// Cosine analysis/synthesis between N modes per axis and an M-point grid,
/// M >= N. M > N zero-pads (used for dealiasing products).
///
/// Owns FFTW plans and scratch buffers: one instance per thread.
class CosineTransform {
public:
  CosineTransform(GridShape modes, GridShape grid, const DomainSpec& d);
  ~CosineTransform();
  CosineTransform(CosineTransform&&) noexcept;
  CosineTransform& operator=(CosineTransform&&) noexcept;
  CosineTransform(const CosineTransform&) = delete;
  CosineTransform& operator=(const CosineTransform&) = delete;

  const GridShape& modes() const;
  const GridShape& grid() const;

  /// Synthesis: grid values of sum_K c_K e_K.
  void to_grid(const SpectralField& f, RealGrid& out);
  /// Analysis, truncated to the mode box. The zero mode carries the mean.
  void to_spectral(const RealGrid& g, SpectralField& out);

  /// Grid values of d f / d x_axis.
  void gradient_to_grid(const SpectralField& f, int axis, RealGrid& out);
  /// acc += scale * P_N d(flux)/d x_axis, where `flux` is odd about the faces
  /// normal to `axis` (a sine series along that axis).
  void add_divergence(const RealGrid& flux, int axis, SpectralField& acc,
                      double scale = 1.0);

  /// Midpoint quadrature of grid values over the box.
  double integrate(const RealGrid& g) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Analysis on the sample grid itself (M = N); the mean is discarded.
SpectralField forward_transform(const RealGrid& grid, const DomainSpec& d);
/// Synthesis on an N-point grid, or on `grid` points per axis when given.
RealGrid inverse_transform(const SpectralField& f, const DomainSpec& d);
RealGrid inverse_transform(const SpectralField& f, const DomainSpec& d,
                           GridShape grid);

// Grid serialisation: binary is a little header ("CHTGRID1", three uint64
// dims) followed by row-major float64 values; CSV is "x1,x2,x3,value" rows.
void write_grid_binary(std::ostream& os, const RealGrid& g);
RealGrid read_grid_binary(std::istream& is);
void write_grid_csv(std::ostream& os, const RealGrid& g, const DomainSpec& d);

}  // namespace cht
