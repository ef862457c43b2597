#include "geonflow/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "geonflow/errors.hpp"

namespace geonflow {

namespace {

double elementary_phi(double s, int n) { return std::pow(std::cosh(0.5 * n * s), 2.0 / n); }
double elementary_dphi(double s, int n) { return elementary_phi(s, n) * std::tanh(0.5 * n * s); }

std::vector<double> derivative_of_diagonal(const DiagonalMetricSpec& spec, double s, double h) {
  const auto p = spec.diagonal(s + h), m = spec.diagonal(s - h);
  std::vector<double> d(p.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = (p[k] - m[k]) / (2.0 * h);
  return d;
}

// Gamma^a_{bc} with only d/ds acting: index 0 is s.
std::vector<double> christoffel_from(const std::vector<double>& g, const std::vector<double>& dg) {
  const int m = static_cast<int>(g.size());
  std::vector<double> gam(m * m * m, 0.0);
  auto at = [&](int a, int b, int c) -> double& { return gam[(a * m + b) * m + c]; };
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        // 1/2 g^{aa} (d_b g_ac + d_c g_ab - d_a g_bc) for a diagonal metric
        double sum = 0.0;
        if (b == 0 && a == c) sum += dg[a];
        if (c == 0 && a == b) sum += dg[a];
        if (a == 0 && b == c) sum -= dg[b];
        at(a, b, c) = 0.5 * sum / g[a];
      }
  return gam;
}

RiemannTensor riemann_at_step(const DiagonalMetricSpec& spec, double s, double h) {
  const int m = spec.dim();
  const auto g = spec.diagonal(s);
  const auto gam = christoffel_fd(spec, s, h);
  const auto gp = christoffel_fd(spec, s + h, h);
  const auto gm = christoffel_fd(spec, s - h, h);
  auto G = [&](int a, int b, int c) { return gam[(a * m + b) * m + c]; };
  auto dG = [&](int d, int a, int b, int c) {
    return d == 0 ? (gp[(a * m + b) * m + c] - gm[(a * m + b) * m + c]) / (2.0 * h) : 0.0;
  };
  RiemannTensor r;
  r.dim = m;
  r.data.assign(m * m * m * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          double up = dG(c, a, d, b) - dG(d, a, c, b);
          for (int e = 0; e < m; ++e) up += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
          r.at(a, b, c, d) = g[a] * up;
        }
  return r;
}

std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine) {
  std::vector<double> out(coarse.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
  return out;
}

}  // namespace

std::vector<double> DiagonalMetricSpec::diagonal(double s) const {
  const double a = radial(s), b = xi(s), c = theta(s);
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0) || !std::isfinite(a * b * c)) {
    std::ostringstream os;
    os << "metric " << (label.empty() ? "?" : label) << " is degenerate at s = " << s;
    throw ProbeError(os.str());
  }
  std::vector<double> g(n, c);
  g[0] = a;
  g[1] = b;
  return g;
}

DiagonalMetricSpec flat_spec(int n) {
  DiagonalMetricSpec spec;
  spec.n = n;
  spec.radial = spec.xi = spec.theta = [](double) { return 1.0; };
  spec.label = "flat";
  return spec;
}

DiagonalMetricSpec conformal_spec(int n, ConformalChoice choice) {
  if (n != 3 && n != 4) throw DomainError("dimension must be 3 or 4");
  auto factor = [n, choice](double s) {
    const double p = elementary_phi(s, n), dp = elementary_dphi(s, n);
    switch (choice) {
      case ConformalChoice::GPrime: return 1.0 / (p * p);
      case ConformalChoice::G: return 1.0;
      case ConformalChoice::GTilde: return p * p;
      case ConformalChoice::GBar: return p * p * dp * dp;
    }
    return 1.0;
  };
  DiagonalMetricSpec spec;
  spec.n = n;
  spec.radial = factor;
  spec.xi = [n, factor](double s) {
    const double dp = elementary_dphi(s, n);
    return factor(s) * dp * dp;
  };
  spec.theta = [n, factor](double s) {
    const double p = elementary_phi(s, n);
    return factor(s) * p * p;
  };
  spec.label = std::string(to_string(choice));
  return spec;
}

double RiemannTensor::bianchi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d)
          worst = std::max(worst, std::abs((*this)(a, b, c, d) + (*this)(a, c, d, b) +
                                           (*this)(a, d, b, c)));
  return worst;
}

double RiemannTensor::symmetry_residual() const {
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) {
          const double r = (*this)(a, b, c, d);
          worst = std::max(worst, std::abs(r + (*this)(b, a, c, d)) +
                                      std::abs(r + (*this)(a, b, d, c)) +
                                      std::abs(r - (*this)(c, d, a, b)));
        }
  return worst;
}

std::vector<double> christoffel_fd(const DiagonalMetricSpec& spec, double s, double h) {
  return christoffel_from(spec.diagonal(s), derivative_of_diagonal(spec, s, h));
}

RiemannTensor riemann_fd(const DiagonalMetricSpec& spec, double s) {
  const double h = spec.fd_step;
  RiemannTensor coarse = riemann_at_step(spec, s, h);
  if (!spec.richardson) return coarse;
  const RiemannTensor fine = riemann_at_step(spec, s, 0.5 * h);
  coarse.data = richardson(coarse.data, fine.data);
  return coarse;
}

CurvatureTable<double> fd_table(const DiagonalMetricSpec& spec, double s) {
  const RiemannTensor r = riemann_fd(spec, s);
  const double p = elementary_phi(s, spec.n);
  CurvatureTable<double> t;
  t.s = s;
  t.qxqx = p * p * r(0, 1, 0, 1);
  t.qiqi = p * p * r(0, 2, 0, 2);
  t.xixi = r(1, 2, 1, 2);
  t.ijij = spec.n == 4 ? r(2, 3, 2, 3) : 0.0;
  return t;
}

StaticProfile geon_profile(int n) {
  return {[n](double s) { return elementary_phi(s, n); },
          [n](double s) { return elementary_dphi(s, n); }};
}

StaticProfile perturbed_profile(int n, double eps) {
  return {[n, eps](double s) { return elementary_phi(s, n) * (1.0 + eps * s); },
          [n, eps](double s) {
            return elementary_dphi(s, n) * (1.0 + eps * s) + eps * elementary_phi(s, n);
          }};
}

StaticResidual static_residual(double s, int n, const StaticProfile& profile, double fd_step) {
  DiagonalMetricSpec spec;
  spec.n = n;
  spec.radial = [](double) { return 1.0; };
  spec.xi = [profile](double x) {
    const double d = profile.dphi(x);
    return d * d;
  };
  spec.theta = [profile](double x) {
    const double p = profile.phi(x);
    return p * p;
  };
  spec.fd_step = fd_step;
  spec.label = "static";

  const RiemannTensor r = riemann_fd(spec, s);
  const auto g = spec.diagonal(s);
  const int m = n;

  // Gradient and Hessian of the potential; d/ds of dphi by Richardson-extrapolated differences.
  const double f = profile.phi(s), df = profile.dphi(s);
  auto dd = [&](double h) { return (profile.dphi(s + h) - profile.dphi(s - h)) / (2.0 * h); };
  const double d2f = (4.0 * dd(0.5 * fd_step) - dd(fd_step)) / 3.0;
  const auto gam = richardson(christoffel_fd(spec, s, fd_step),
                              christoffel_fd(spec, s, 0.5 * fd_step));

  std::vector<double> ric(m, 0.0), hess(m, 0.0);
  for (int b = 0; b < m; ++b) {
    for (int a = 0; a < m; ++a) ric[b] += r(a, b, a, b) / g[a];
    hess[b] = (b == 0 ? d2f : 0.0) - gam[(0 * m + b) * m + b] * df;
  }
  double lap = 0.0, scalar = 0.0;
  for (int b = 0; b < m; ++b) {
    lap += hess[b] / g[b];
    scalar += ric[b] / g[b];
  }
  StaticResidual out;
  for (int b = 0; b < m; ++b) {
    // Off-diagonal entries vanish identically for this diagonal, s-dependent metric.
    const double t = g[b] * lap + f * ric[b] - hess[b];
    out.tensor = std::max(out.tensor, std::abs(t / g[b]) / f);
  }
  out.scalar = std::abs(scalar + n * (n - 1.0));
  return out;
}

StaticResidual static_residual(double s, int n) { return static_residual(s, n, geon_profile(n)); }

NodeForm embed_second_form_fd(const GraphSurface& surface, ConformalChoice choice, int i, int j,
                              double fd_step) {
  const int n = surface.n();
  const auto& grid = surface.grid();
  const TrigInterpolant V(surface.ops(), surface.v());
  const double x = grid.spacing(0) * i, y = grid.spacing(1) * j;

  struct Jet {
    double v, vx, vy, vxx, vxy, vyy;
  };
  auto jet = [&](double h) {
    const double c = V(x, y);
    const double xp = V(x + h, y), xm = V(x - h, y), yp = V(x, y + h), ym = V(x, y - h);
    const double pp = V(x + h, y + h), pm = V(x + h, y - h), mp = V(x - h, y + h),
                 mm = V(x - h, y - h);
    return Jet{c,
               (xp - xm) / (2.0 * h),
               (yp - ym) / (2.0 * h),
               (xp - 2.0 * c + xm) / (h * h),
               (pp - pm - mp + mm) / (4.0 * h * h),
               (yp - 2.0 * c + ym) / (h * h)};
  };
  const Jet a = jet(fd_step), b = jet(0.5 * fd_step);
  auto rich = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
  const Jet J{a.v,
              rich(a.vx, b.vx),
              rich(a.vy, b.vy),
              rich(a.vxx, b.vxx),
              rich(a.vxy, b.vxy),
              rich(a.vyy, b.vyy)};

  DiagonalMetricSpec spec = conformal_spec(n, choice);
  const double s = J.v;
  const int m = n;
  const auto gam = richardson(christoffel_fd(spec, s, spec.fd_step),
                              christoffel_fd(spec, s, 0.5 * spec.fd_step));
  const auto g = spec.diagonal(s);
  auto G = [&](int p, int q, int r) { return gam[(p * m + q) * m + r]; };

  // Ambient index of each grid axis: (xi, theta) for n=3, (theta3, theta4) for n=4.
  const int ix = n == 3 ? 1 : 2, iy = n == 3 ? 2 : 3;
  std::vector<double> tx(m, 0.0), ty(m, 0.0), dphi_cov(m, 0.0);
  tx[0] = J.vx;
  tx[ix] = 1.0;
  ty[0] = J.vy;
  ty[iy] = 1.0;
  // Level set s - v(x) = 0 has conormal ds - v_x dx - v_y dy.
  dphi_cov[0] = 1.0;
  dphi_cov[ix] = -J.vx;
  dphi_cov[iy] = -J.vy;
  double norm2 = 0.0;
  for (int k = 0; k < m; ++k) norm2 += dphi_cov[k] * dphi_cov[k] / g[k];
  const double norm = std::sqrt(norm2);

  auto form = [&](const std::vector<double>& ta, const std::vector<double>& tb, double second) {
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      double cov = k == 0 ? second : 0.0;
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) cov += G(k, p, q) * ta[p] * tb[q];
      sum += cov * dphi_cov[k];
    }
    return -sum / norm;
  };
  NodeForm out;
  out.xx = form(tx, tx, J.vxx);
  out.xy = form(tx, ty, J.vxy);
  out.yy = form(ty, ty, J.vyy);
  if (n == 4) {
    std::vector<double> txi(m, 0.0);
    txi[1] = 1.0;
    out.axial = form(txi, txi, 0.0);
  }
  return out;
}

}  // namespace geonflow
