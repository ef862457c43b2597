#include "geonflow/spectral.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "geonflow/errors.hpp"

namespace geonflow {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kFilterAlpha = 36.0;

// Grid fields are ~128 KiB, right at glibc's mmap threshold; without this every temporary is a
// fresh mapping and the page faults dominate the step cost.
void tune_allocator() {
#if defined(__GLIBC__)
  static std::once_flag once;
  std::call_once(once, [] {
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
  });
#endif
}

}  // namespace

PeriodicGrid::PeriodicGrid(std::array<AxisLabel, 2> labels, int n1, int n2, double period1,
                           double period2)
    : labels_(labels), sizes_{n1, n2}, periods_{period1, period2} {
  for (int s : sizes_)
    if (s < 16 || s % 2 != 0) throw DomainError("grid sizes must be even and at least 16");
  for (double p : periods_)
    if (!(p > 0.0)) throw DomainError("grid periods must be positive");
}

PeriodicGrid PeriodicGrid::for_params(const GeonParams& params, int n1, int n2) {
  if (params.n() == 3)
    return {{AxisLabel::Xi, AxisLabel::Theta3}, n1, n2, params.xi_period(), params.periods()[0]};
  return {{AxisLabel::Theta3, AxisLabel::Theta4}, n1, n2, params.periods()[0],
          params.periods()[1]};
}

Eigen::ArrayXXd PeriodicGrid::coordinate(int axis) const {
  Eigen::ArrayXXd c(n1(), n2());
  const double h = spacing(axis);
  for (int j = 0; j < n2(); ++j)
    for (int i = 0; i < n1(); ++i) c(i, j) = h * (axis == 0 ? i : j);
  return c;
}

PeriodicGrid PeriodicGrid::transposed() const {
  return {{labels_[1], labels_[0]}, sizes_[1], sizes_[0], periods_[1], periods_[0]};
}

bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
  return a.label(0) == b.label(0) && a.label(1) == b.label(1) && a.n1() == b.n1() &&
         a.n2() == b.n2() && a.period(0) == b.period(0) && a.period(1) == b.period(1);
}

struct SpectralOps::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;  // forward output, kept intact
  fftw_complex* work = nullptr;  // scratch for the (destructive) inverse transform
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Plans(int n1, int n2, int nc1) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n1) * n2);
    spec = fftw_alloc_complex(static_cast<std::size_t>(nc1) * n2);
    work = fftw_alloc_complex(static_cast<std::size_t>(nc1) * n2);
    // Column-major n1 x n2 is row-major (n2, n1): the fast axis goes last.
    r2c = fftw_plan_dft_r2c_2d(n2, n1, real, spec, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_2d(n2, n1, work, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
    fftw_free(work);
  }
};

SpectralOps::SpectralOps(const PeriodicGrid& grid)
    : grid_(grid), nc1_(grid.n1() / 2 + 1),
      plans_(std::make_unique<Plans>(grid.n1(), grid.n2(), nc1_)) {
  tune_allocator();
  k1_.resize(nc1_);
  k2_.resize(grid.n2());
  for (int i = 0; i < nc1_; ++i) k1_(i) = wavenumber(0, i);
  for (int j = 0; j < grid.n2(); ++j) k2_(j) = wavenumber(1, j);
  odd1_ = k1_;
  odd2_ = k2_;
  odd1_(grid.n1() / 2) = 0.0;
  odd2_(grid.n2() / 2) = 0.0;
}

SpectralOps::~SpectralOps() = default;

double SpectralOps::wavenumber(int axis, int j) const {
  const int n = grid_.size(axis);
  const int k = (axis == 0 || j <= n / 2) ? j : j - n;
  return 2.0 * std::numbers::pi * k / grid_.period(axis);
}

void SpectralOps::load(const Eigen::ArrayXXd& f) const {
  if (f.rows() != grid_.n1() || f.cols() != grid_.n2())
    throw DomainError("field does not match grid");
  std::copy(f.data(), f.data() + f.size(), plans_->real);
  fftw_execute(plans_->r2c);
}

void SpectralOps::emit(int a, int b, Eigen::ArrayXXd& out) const {
  const int n1 = grid_.n1(), n2 = grid_.n2();
  const double norm = 1.0 / (static_cast<double>(n1) * n2);
  const double* m1 = a % 2 == 1 ? odd1_.data() : k1_.data();
  const double* m2 = b % 2 == 1 ? odd2_.data() : k2_.data();
  const auto* src = reinterpret_cast<const std::complex<double>*>(plans_->spec);
  auto* dst = reinterpret_cast<std::complex<double>*>(plans_->work);
  // (i k1)^a (i k2)^b = i^(a+b) k1^a k2^b
  const int r = (a + b) % 4;
  for (int j = 0; j < n2; ++j) {
    const double f2 = (b == 0 ? 1.0 : b == 1 ? m2[j] : m2[j] * m2[j]) * norm;
    for (int i = 0; i < nc1_; ++i) {
      const double f = (a == 0 ? 1.0 : a == 1 ? m1[i] : m1[i] * m1[i]) * f2;
      const std::complex<double> c = src[j * nc1_ + i] * f;
      dst[j * nc1_ + i] = r == 0   ? c
                          : r == 1 ? std::complex<double>(-c.imag(), c.real())
                          : r == 2 ? -c
                                   : std::complex<double>(c.imag(), -c.real());
    }
  }
  fftw_execute(plans_->c2r);
  out.resize(n1, n2);
  std::copy(plans_->real, plans_->real + out.size(), out.data());
}

Eigen::ArrayXXcd SpectralOps::forward(const Eigen::ArrayXXd& f) const {
  load(f);
  Eigen::ArrayXXcd out(nc1_, grid_.n2());
  std::copy_n(reinterpret_cast<const std::complex<double>*>(plans_->spec), out.size(), out.data());
  return out;
}

Eigen::ArrayXXd SpectralOps::backward(const Eigen::ArrayXXcd& coeffs) const {
  const int n1 = grid_.n1(), n2 = grid_.n2();
  std::copy_n(coeffs.data(), coeffs.size(), reinterpret_cast<std::complex<double>*>(plans_->work));
  fftw_execute(plans_->c2r);
  Eigen::ArrayXXd out(n1, n2);
  const double norm = 1.0 / (static_cast<double>(n1) * n2);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = plans_->real[i] * norm;
  return out;
}

Eigen::ArrayXXd SpectralOps::derivative(const Eigen::ArrayXXd& f, int axis) const {
  load(f);
  Eigen::ArrayXXd out;
  emit(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1, out);
  return out;
}

Gradient SpectralOps::gradient(const Eigen::ArrayXXd& f) const {
  load(f);
  Gradient g;
  emit(1, 0, g.x);
  emit(0, 1, g.y);
  return g;
}

void SpectralOps::gradient_into(const Eigen::ArrayXXd& f, Eigen::ArrayXXd& dx,
                                Eigen::ArrayXXd& dy) const {
  load(f);
  emit(1, 0, dx);
  emit(0, 1, dy);
}

Partials SpectralOps::partials(const Eigen::ArrayXXd& f) const {
  load(f);
  Partials p;
  emit(1, 0, p.x);
  emit(0, 1, p.y);
  emit(2, 0, p.xx);
  emit(1, 1, p.xy);
  emit(0, 2, p.yy);
  return p;
}

Eigen::ArrayXXd SpectralOps::filter(const Eigen::ArrayXXd& f, int order) const {
  Eigen::ArrayXXd out;
  filter_into(f, order, out);
  return out;
}

void SpectralOps::filter_into(const Eigen::ArrayXXd& f, int order, Eigen::ArrayXXd& out) const {
  load(f);
  const int n1 = grid_.n1(), n2 = grid_.n2();
  if (filter_order_ != order) {
    filter_order_ = order;
    filter1_.resize(nc1_);
    filter2_.resize(n2);
    for (int i = 0; i < nc1_; ++i)
      filter1_(i) = std::exp(-kFilterAlpha * std::pow(static_cast<double>(i) / (n1 / 2), order));
    for (int j = 0; j < n2; ++j) {
      const int k = j <= n2 / 2 ? j : n2 - j;
      filter2_(j) = std::exp(-kFilterAlpha * std::pow(static_cast<double>(k) / (n2 / 2), order));
    }
  }
  const double norm = 1.0 / (static_cast<double>(n1) * n2);
  const auto* src = reinterpret_cast<const std::complex<double>*>(plans_->spec);
  auto* dst = reinterpret_cast<std::complex<double>*>(plans_->work);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < nc1_; ++i)
      dst[j * nc1_ + i] = src[j * nc1_ + i] * (filter1_(i) * filter2_(j) * norm);
  fftw_execute(plans_->c2r);
  out.resize(n1, n2);
  std::copy(plans_->real, plans_->real + out.size(), out.data());
}

Partials fd4_partials(const PeriodicGrid& grid, const Eigen::ArrayXXd& f) {
  const int n1 = grid.n1(), n2 = grid.n2();
  const double h1 = grid.spacing(0), h2 = grid.spacing(1);
  const auto at = [&](int i, int j) { return f((i + n1) % n1, (j + n2) % n2); };
  const auto d1 = [](double m2, double m1, double p1, double p2, double h) {
    return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  };
  const auto d2 = [](double m2, double m1, double c, double p1, double p2, double h) {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
  };
  Partials p;
  p.x.resize(n1, n2);
  p.y.resize(n1, n2);
  p.xx.resize(n1, n2);
  p.yy.resize(n1, n2);
  p.xy.resize(n1, n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      p.x(i, j) = d1(at(i - 2, j), at(i - 1, j), at(i + 1, j), at(i + 2, j), h1);
      p.y(i, j) = d1(at(i, j - 2), at(i, j - 1), at(i, j + 1), at(i, j + 2), h2);
      p.xx(i, j) = d2(at(i - 2, j), at(i - 1, j), f(i, j), at(i + 1, j), at(i + 2, j), h1);
      p.yy(i, j) = d2(at(i, j - 2), at(i, j - 1), f(i, j), at(i, j + 1), at(i, j + 2), h2);
    }
  // Mixed partial as the y-derivative of the x-derivative.
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const auto px = [&](int jj) { return p.x(i, (jj + n2) % n2); };
      p.xy(i, j) = d1(px(j - 2), px(j - 1), px(j + 1), px(j + 2), h2);
    }
  return p;
}

Partials partials(const SpectralOps& ops, const Eigen::ArrayXXd& f, DerivativeMode mode) {
  return mode == DerivativeMode::Spectral ? ops.partials(f) : fd4_partials(ops.grid(), f);
}

TrigInterpolant::TrigInterpolant(const SpectralOps& ops, const Eigen::ArrayXXd& f)
    : coeffs_(ops.forward(f)), n1_(ops.grid().n1()) {
  const auto& g = ops.grid();
  k1_.resize(coeffs_.rows());
  k2_.resize(coeffs_.cols());
  for (Eigen::Index i = 0; i < k1_.size(); ++i) k1_(i) = ops.wavenumber(0, static_cast<int>(i));
  for (Eigen::Index j = 0; j < k2_.size(); ++j) k2_(j) = ops.wavenumber(1, static_cast<int>(j));
  norm_ = 1.0 / (static_cast<double>(g.n1()) * g.n2());
  // Split the Nyquist columns symmetrically so the interpolant stays real off-grid.
  if (g.n2() % 2 == 0) coeffs_.col(g.n2() / 2) *= 0.5;
}

double TrigInterpolant::operator()(double x, double y) const {
  const Eigen::Index n2 = coeffs_.cols(), nc1 = coeffs_.rows();
  // Sum over the second axis first, then combine rows with e^{i k1 x}.
  Eigen::ArrayXcd ey(n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    ey(j) = std::polar(1.0, k2_(j) * y);
    if (2 * j == n2) ey(j) += std::polar(1.0, -k2_(j) * y);
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < nc1; ++i) {
    const double w = (i == 0 || 2 * i == n1_) ? 1.0 : 2.0;
    std::complex<double> row = 0.0;
    for (Eigen::Index j = 0; j < n2; ++j) row += coeffs_(i, j) * ey(j);
    total += w * (row * std::polar(1.0, k1_(i) * x)).real();
  }
  return total * norm_;
}

}  // namespace geonflow
