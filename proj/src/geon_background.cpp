#include "geonflow/geon_background.hpp"

#include <algorithm>
#include <numeric>

#include "geonflow/quadrature.hpp"

namespace geonflow {

GeonParams::GeonParams(int n, std::vector<double> periods) : n_(n), periods_(std::move(periods)) {
  if (n_ != 3 && n_ != 4) throw DomainError("geon dimension must be 3 or 4");
  if (static_cast<int>(periods_.size()) != n_ - 2)
    throw DomainError("expected " + std::to_string(n_ - 2) + " torus period(s)");
  for (double a : periods_)
    if (!(a > 0.0)) throw DomainError("torus periods must be positive");
}

double GeonParams::coordinate_area() const {
  return std::accumulate(periods_.begin(), periods_.end(), xi_period(), std::multiplies<>());
}

double mass(const GeonParams& params) { return -params.coordinate_area(); }

RadialProfile::RadialProfile(int n, double s_max, double quadrature_tol)
    : n_(n), s_max_(s_max), tol_(quadrature_tol) {
  if (n != 3 && n != 4) throw DomainError("geon dimension must be 3 or 4");
  if (!(s_max > 0.0)) throw DomainError("s_max must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil(s_max * 1024.0));
  h_ = s_max / static_cast<double>(cells);
  q_.resize(cells + 1);
  slope_.resize(cells + 1);

  const auto inv_phi = [n](double x) { return 1.0 / phi(x, n); };
  const double cell_tol = tol_ / static_cast<double>(cells);
  // Neumaier-compensated running sum keeps the accumulated error below tol.
  double sum = 0.0, comp = 0.0;
  q_[0] = 0.0;
  slope_[0] = 1.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double a = h_ * static_cast<double>(i);
    const double b = h_ * static_cast<double>(i + 1);
    const double piece = integrate(inv_phi, a, b, cell_tol);
    const double t = sum + piece;
    comp += std::abs(sum) >= std::abs(piece) ? (sum - t) + piece : (piece - t) + sum;
    sum = t;
    q_[i + 1] = sum + comp;
    slope_[i + 1] = inv_phi(b);
  }
}

double RadialProfile::hermite(std::size_t cell, double s) const {
  const double t = (s - h_ * static_cast<double>(cell)) / h_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * q_[cell] + h10 * h_ * slope_[cell] + h01 * q_[cell + 1] +
         h11 * h_ * slope_[cell + 1];
}

double RadialProfile::hermite_slope(std::size_t cell, double s) const {
  const double t = (s - h_ * static_cast<double>(cell)) / h_;
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * q_[cell] + d01 * q_[cell + 1]) / h_ + d10 * slope_[cell] + d11 * slope_[cell + 1];
}

double RadialProfile::q_of_s(double s) const {
  detail::require_nonnegative(s);
  if (s >= s_max_) {
    const int n = n_;
    return q_.back() + integrate([n](double x) { return 1.0 / phi(x, n); }, s_max_, s, tol_);
  }
  const auto cell = std::min(static_cast<std::size_t>(s / h_), q_.size() - 2);
  return hermite(cell, s);
}

Eigen::ArrayXXd RadialProfile::q_of_s(const Eigen::ArrayXXd& s) const {
  return s.unaryExpr([this](double x) { return q_of_s(x); });
}

double RadialProfile::s_of_q(double q) const {
  if (!(q >= 0.0)) throw DomainError("q must be non-negative");
  if (q > q_.back())
    throw RangeError("q = " + std::to_string(q) + " beyond the tabulated range (q_max = " +
                     std::to_string(q_.back()) + "); rebuild the profile with a larger s_max");
  if (q == 0.0) return 0.0;
  const auto it = std::upper_bound(q_.begin(), q_.end(), q);
  const auto cell = std::min(static_cast<std::size_t>(std::distance(q_.begin(), it)) - 1,
                             q_.size() - 2);
  double lo = h_ * static_cast<double>(cell);
  double hi = lo + h_;
  double s = lo + h_ * (q - q_[cell]) / (q_[cell + 1] - q_[cell]);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = hermite(cell, s) - q;
    if (f == 0.0) break;
    (f > 0.0 ? hi : lo) = s;
    double next = s - f / hermite_slope(cell, s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-16 * std::max(1.0, s)) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

}  // namespace geonflow
