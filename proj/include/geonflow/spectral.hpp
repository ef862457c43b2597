#pragma once

// Uniform periodic grids over T^2 and trigonometric differentiation on them.
//
// Fields are Eigen::ArrayXXd of shape n1 x n2; entry (i, j) sits at (i h1, j h2).

#include <array>
#include <complex>
#include <memory>
#include <string_view>

#include <Eigen/Core>

#include "geonflow/geon_background.hpp"

namespace geonflow {

enum class AxisLabel { Xi, Theta3, Theta4 };

constexpr std::string_view to_string(AxisLabel a) {
  switch (a) {
    case AxisLabel::Xi: return "xi";
    case AxisLabel::Theta3: return "theta3";
    case AxisLabel::Theta4: return "theta4";
  }
  return "?";
}

/// Discretisation of the two resolved torus directions. For n=3 the axes are (xi, theta3);
/// for n=4 the surface is xi-symmetric and the axes are (theta3, theta4).
class PeriodicGrid {
 public:
  PeriodicGrid(std::array<AxisLabel, 2> labels, int n1, int n2, double period1, double period2);

  /// Grid matching the resolved directions of `params`.
  static PeriodicGrid for_params(const GeonParams& params, int n1, int n2);

  AxisLabel label(int axis) const { return labels_[axis]; }
  int size(int axis) const { return sizes_[axis]; }
  int n1() const { return sizes_[0]; }
  int n2() const { return sizes_[1]; }
  double period(int axis) const { return periods_[axis]; }
  double spacing(int axis) const { return periods_[axis] / sizes_[axis]; }
  double min_spacing() const { return std::min(spacing(0), spacing(1)); }
  double cell_area() const { return spacing(0) * spacing(1); }
  /// Node coordinate along `axis`, broadcast to an n1 x n2 field.
  Eigen::ArrayXXd coordinate(int axis) const;

  /// Same torus with axes (and periods) swapped.
  PeriodicGrid transposed() const;

 private:
  std::array<AxisLabel, 2> labels_;
  std::array<int, 2> sizes_;
  std::array<double, 2> periods_;
};

bool operator==(const PeriodicGrid& a, const PeriodicGrid& b);

enum class DerivativeMode { Spectral, FiniteDifference4 };

/// First and second partials of a field along the grid axes.
struct Partials {
  Eigen::ArrayXXd x, y, xx, xy, yy;
};

struct Gradient {
  Eigen::ArrayXXd x, y;
};

/// FFT-based differentiation, filtering and interpolation on one grid.
///
/// Holds FFTW plans and scratch buffers: methods are logically const but an instance must not be
/// used from two threads at once. Plans use FFTW_ESTIMATE so results are bit-reproducible.
class SpectralOps {
 public:
  explicit SpectralOps(const PeriodicGrid& grid);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  const PeriodicGrid& grid() const { return grid_; }

  Gradient gradient(const Eigen::ArrayXXd& f) const;
  /// Allocation-free variants for the time-stepping loop (outputs resized only when needed).
  void gradient_into(const Eigen::ArrayXXd& f, Eigen::ArrayXXd& dx, Eigen::ArrayXXd& dy) const;
  void filter_into(const Eigen::ArrayXXd& f, int order, Eigen::ArrayXXd& out) const;
  Partials partials(const Eigen::ArrayXXd& f) const;
  /// d/dx_axis of f.
  Eigen::ArrayXXd derivative(const Eigen::ArrayXXd& f, int axis) const;
  /// Exponential filter exp(-alpha eta^order) per axis, eta = |k| / k_nyquist, alpha = 36.
  Eigen::ArrayXXd filter(const Eigen::ArrayXXd& f, int order) const;

  /// Complex Fourier coefficients (unnormalised r2c layout, (n1/2+1) x n2).
  Eigen::ArrayXXcd forward(const Eigen::ArrayXXd& f) const;
  Eigen::ArrayXXd backward(const Eigen::ArrayXXcd& coeffs) const;

  /// Angular wavenumber of r2c index j along axis 0 (j <= n1/2) or axis 1.
  double wavenumber(int axis, int j) const;

 private:
  // Transforms v into the internal spectrum buffer.
  void load(const Eigen::ArrayXXd& f) const;
  // Inverse transform of spectrum * (i k1)^a (i k2)^b into `out`.
  void emit(int a, int b, Eigen::ArrayXXd& out) const;

  PeriodicGrid grid_;
  int nc1_;  // n1/2 + 1
  Eigen::ArrayXd k1_, k2_;      // angular wavenumbers, Nyquist kept
  Eigen::ArrayXd odd1_, odd2_;  // same with the Nyquist entry zeroed (odd derivative orders)
  mutable int filter_order_ = -1;
  mutable Eigen::ArrayXd filter1_, filter2_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

/// Fourth-order centred finite differences with periodic wrap (cross-check mode).
Partials fd4_partials(const PeriodicGrid& grid, const Eigen::ArrayXXd& f);

/// Partials in the requested mode.
Partials partials(const SpectralOps& ops, const Eigen::ArrayXXd& f, DerivativeMode mode);

/// Trigonometric interpolant of grid data, evaluable anywhere on the torus.
class TrigInterpolant {
 public:
  TrigInterpolant(const SpectralOps& ops, const Eigen::ArrayXXd& f);
  double operator()(double x, double y) const;

 private:
  Eigen::ArrayXXcd coeffs_;
  Eigen::ArrayXd k1_, k2_;
  double norm_;
  int n1_;
};

}  // namespace geonflow
