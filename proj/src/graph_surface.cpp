#include "geonflow/graph_surface.hpp"

#include <cmath>
#include <numbers>

namespace geonflow {

using Eigen::ArrayXXd;

GraphSurface::GraphSurface(GeonParams params, const PeriodicGrid& grid, ArrayXXd v,
                           std::shared_ptr<const RadialProfile> profile,
                           std::shared_ptr<const SpectralOps> ops)
    : params_(std::move(params)), v_(std::move(v)), profile_(std::move(profile)),
      ops_(std::move(ops)) {
  if (!(grid == PeriodicGrid::for_params(params_, grid.n1(), grid.n2())))
    throw DomainError("grid axes or periods do not match the geon parameters");
  if (v_.rows() != grid.n1() || v_.cols() != grid.n2())
    throw DomainError("height field does not match the grid");
  if (!v_.allFinite()) throw DomainError("height field has non-finite entries");
  if (!(v_.minCoeff() >= 0.0)) throw DomainError("heights must be non-negative");
  if (!profile_) profile_ = std::make_shared<RadialProfile>(params_.n());
  if (profile_->n() != params_.n()) throw DomainError("radial profile has the wrong dimension");
  if (!ops_) ops_ = std::make_shared<SpectralOps>(grid);
  if (!(ops_->grid() == grid)) throw DomainError("spectral workspace is for a different grid");
}

const ArrayXXd& GraphSurface::u() const {
  if (!u_) u_ = std::make_shared<ArrayXXd>(profile_->q_of_s(v_));
  return *u_;
}

GraphSurface GraphSurface::with_heights(ArrayXXd v) const {
  return GraphSurface(params_, grid(), std::move(v), profile_, ops_);
}

GraphSurface coordinate_torus(const GeonParams& params, const PeriodicGrid& grid, double s0) {
  return GraphSurface(params, grid, ArrayXXd::Constant(grid.n1(), grid.n2(), s0));
}

GraphSurface mode_surface(const GeonParams& params, const PeriodicGrid& grid, double s0,
                          const std::vector<Mode>& modes) {
  ArrayXXd v = ArrayXXd::Constant(grid.n1(), grid.n2(), s0);
  const ArrayXXd x = grid.coordinate(0), y = grid.coordinate(1);
  const double w1 = 2.0 * std::numbers::pi / grid.period(0);
  const double w2 = 2.0 * std::numbers::pi / grid.period(1);
  for (const auto& m : modes)
    v += m.amplitude * (w1 * m.k1 * x + w2 * m.k2 * y + m.phase).cos();
  return GraphSurface(params, grid, std::move(v));
}

double SymmetricField::max_abs() const {
  double m = std::max({xx.abs().maxCoeff(), xy.abs().maxCoeff(), yy.abs().maxCoeff()});
  if (has_axial()) m = std::max(m, axial.abs().maxCoeff());
  return m;
}

SymmetricField operator-(const SymmetricField& a, const SymmetricField& b) {
  SymmetricField d{a.xx - b.xx, a.xy - b.xy, a.yy - b.yy, {}};
  if (a.has_axial()) d.axial = a.axial - b.axial;
  return d;
}

SurfaceGeometry analyze(const GraphSurface& surface, DerivativeMode mode) {
  const int n = surface.n();
  const auto& v = surface.v();
  if (!(v.minCoeff() > 0.0))
    throw SingularAxisError("graph touches the central torus where Psi = 0");
  SurfaceGeometry g;
  g.n = n;
  g.ops = surface.ops_ptr();
  const double half_n = 0.5 * n;
  g.phi = phi(v, n);
  g.psi = (half_n * v).tanh();
  g.dphi = g.phi * g.psi;
  g.dpsi = half_n * ((1.0 - n) * g.phi.log()).exp();

  const Partials p = partials(surface.ops(), v, mode);
  const ArrayXXd inv_phi = g.phi.inverse();
  const ArrayXXd c = g.dphi * inv_phi.square();
  g.ux = p.x * inv_phi;
  g.uy = p.y * inv_phi;
  g.uxx = p.xx * inv_phi - c * p.x.square();
  g.uxy = p.xy * inv_phi - c * p.x * p.y;
  g.uyy = p.yy * inv_phi - c * p.y.square();

  if (n == 3)
    g.rho = (1.0 + g.ux.square() / g.psi.square() + g.uy.square()).sqrt();
  else
    g.rho = (1.0 + g.ux.square() + g.uy.square()).sqrt();

  const auto& grid = surface.grid();
  g.cell_weight = grid.cell_area() * (n == 4 ? surface.params().xi_period() : 1.0);
  g.mass = mass(surface.params());
  return g;
}

ArrayXXd SurfaceGeometry::theta_grad2() const {
  return n == 3 ? ArrayXXd(uy.square()) : ArrayXXd(ux.square() + uy.square());
}

SymmetricField SurfaceGeometry::metric() const {
  SymmetricField m;
  const ArrayXXd wx = n == 3 ? ArrayXXd(psi.square()) : ArrayXXd::Ones(psi.rows(), psi.cols());
  m.xx = wx + ux.square();
  m.xy = ux * uy;
  m.yy = 1.0 + uy.square();
  if (n == 4) m.axial = psi.square();
  return m;
}

SymmetricField SurfaceGeometry::inverse_metric() const {
  SymmetricField m;
  const ArrayXXd r2 = rho.square().inverse();
  if (n == 3) {
    const ArrayXXd wx = psi.square().inverse();
    m.xx = wx - r2 * ux.square() * wx.square();
    m.xy = -r2 * ux * uy * wx;
  } else {
    m.xx = 1.0 - r2 * ux.square();
    m.xy = -r2 * ux * uy;
    m.axial = psi.square().inverse();
  }
  m.yy = 1.0 - r2 * uy.square();
  return m;
}

SymmetricField hessian_u(const SurfaceGeometry& g) {
  const ArrayXXd r2 = g.rho.square().inverse();
  const ArrayXXd pp = g.psi * g.dpsi;
  SymmetricField h;
  if (g.n == 3) {
    const ArrayXXd k = g.dpsi / g.psi;
    h.xx = r2 * (g.uxx - 2.0 * k * g.ux.square() - pp) + pp;
    h.xy = r2 * (g.uxy - k * g.ux * g.uy);
  } else {
    h.xx = r2 * g.uxx;
    h.xy = r2 * g.uxy;
    h.axial = (1.0 - r2) * pp;
  }
  h.yy = r2 * g.uyy;
  return h;
}

SymmetricField hessian_u(const GraphSurface& surface) { return hessian_u(analyze(surface)); }

SymmetricField second_form_gprime(const SurfaceGeometry& g) {
  const ArrayXXd ir = g.rho.inverse();
  const ArrayXXd pp = g.psi * g.dpsi;
  SymmetricField h;
  if (g.n == 3) {
    const ArrayXXd k = g.dpsi / g.psi;
    h.xx = ir * (-g.uxx + 2.0 * k * g.ux.square() + pp);
    h.xy = ir * (-g.uxy + k * g.ux * g.uy);
  } else {
    h.xx = -ir * g.uxx;
    h.xy = -ir * g.uxy;
    h.axial = ir * pp;
  }
  h.yy = -ir * g.uyy;
  return h;
}

SymmetricField second_form_from_hessian(const SurfaceGeometry& g) {
  const SymmetricField d = hessian_u(g);
  const ArrayXXd pp = g.rho * g.psi * g.dpsi;
  SymmetricField h{-g.rho * d.xx, -g.rho * d.xy, -g.rho * d.yy, {}};
  if (g.n == 3)
    h.xx += pp;
  else
    h.axial = -g.rho * d.axial + pp;
  return h;
}

namespace {

struct ConformalFields {
  ArrayXXd exp_psi, dpsi;
};

ConformalFields conformal_fields(const SurfaceGeometry& g, ConformalChoice choice) {
  const auto ones = ArrayXXd::Ones(g.phi.rows(), g.phi.cols());
  switch (choice) {
    case ConformalChoice::GPrime:
      return {ones, ArrayXXd::Zero(g.phi.rows(), g.phi.cols())};
    case ConformalChoice::G:
      return {g.phi, g.dphi};
    case ConformalChoice::GTilde:
      return {g.phi.square(), 2.0 * g.dphi};
    case ConformalChoice::GBar: {
      if (!(g.dphi.minCoeff() > 0.0))
        throw SingularAxisError("g_bar is degenerate on the central torus (dphi/ds = 0)");
      const ArrayXXd d2phi = g.phi * g.psi.square() + g.dpsi;  // (n/2) phi^{1-n} = dPsi/dq
      return {g.phi.square() * g.dphi, 2.0 * g.dphi + g.phi * d2phi / g.dphi};
    }
  }
  return {ones, ones};
}

}  // namespace

SymmetricField second_form(const SurfaceGeometry& g, ConformalChoice choice) {
  SymmetricField h = second_form_gprime(g);
  if (choice == ConformalChoice::GPrime) return h;
  const auto [e, dp] = conformal_fields(g, choice);
  const SymmetricField m = g.metric();
  const ArrayXXd c = dp / g.rho;
  h.xx = e * (h.xx + c * m.xx);
  h.xy = e * (h.xy + c * m.xy);
  h.yy = e * (h.yy + c * m.yy);
  if (h.has_axial()) h.axial = e * (h.axial + c * m.axial);
  return h;
}

SymmetricField second_form_direct(const GraphSurface& surface, ConformalChoice choice) {
  return second_form(analyze(surface), choice);
}

ArrayXXd laplacian_u(const SurfaceGeometry& g) {
  const SymmetricField inv = g.inverse_metric();
  const SymmetricField d = hessian_u(g);
  ArrayXXd lap = inv.xx * d.xx + 2.0 * inv.xy * d.xy + inv.yy * d.yy;
  if (d.has_axial()) lap += inv.axial * d.axial;
  return lap;
}

ArrayXXd laplacian_u_divergence(const SurfaceGeometry& g) {
  // gamma'^{ab} u_b = u_a / (w_a rho^2), sqrt(det gamma') = Psi rho.
  const ArrayXXd base = g.psi / g.rho;
  const ArrayXXd fx = g.n == 3 ? ArrayXXd(base * g.ux / g.psi.square()) : ArrayXXd(base * g.ux);
  const ArrayXXd fy = base * g.uy;
  const auto& ops = *g.ops;
  return (ops.derivative(fx, 0) + ops.derivative(fy, 1)) / (g.psi * g.rho);
}

ArrayXXd mean_curvature(const SurfaceGeometry& g, ConformalChoice choice) {
  const auto [e, dp] = conformal_fields(g, choice);
  const ArrayXXd ir = g.rho.inverse();
  const ArrayXXd k = g.dpsi / g.psi;
  const ArrayXXd h_prime = -g.rho * laplacian_u(g) + ir * k * (1.0 + g.theta_grad2());
  return (h_prime + (g.n - 1) * ir * dp) / e;
}

ArrayXXd mean_curvature_g(const GraphSurface& surface) {
  return mean_curvature(analyze(surface), ConformalChoice::G);
}

ArrayXXd min_mixed_eig(const SymmetricField& inv, const SymmetricField& t) {
  const ArrayXXd tr = inv.xx * t.xx + 2.0 * inv.xy * t.xy + inv.yy * t.yy;
  const ArrayXXd det = (inv.xx * inv.yy - inv.xy.square()) * (t.xx * t.yy - t.xy.square());
  const ArrayXXd disc = (0.25 * tr.square() - det).max(0.0);
  ArrayXXd lo = 0.5 * tr - disc.sqrt();
  if (t.has_axial()) lo = lo.min(inv.axial * t.axial);
  return lo;
}

ArrayXXd weingarten_min_eig_field(const SurfaceGeometry& g, ConformalChoice choice) {
  const auto [e, dp] = conformal_fields(g, choice);
  const ArrayXXd lo = min_mixed_eig(g.inverse_metric(), second_form_gprime(g));
  return (lo + dp / g.rho) / e;
}

double weingarten_min_eig(const GraphSurface& surface, ConformalChoice choice) {
  return weingarten_min_eig_field(analyze(surface), choice).minCoeff();
}

double min_hessian_eig(const SurfaceGeometry& g) {
  return min_mixed_eig(g.inverse_metric(), hessian_u(g)).minCoeff();
}

Eigen::ArrayXXd slope(const GraphSurface& surface) { return analyze(surface).rho; }

}  // namespace geonflow
