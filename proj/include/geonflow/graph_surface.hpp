#pragma once

// Toroidal hypersurfaces written as radial graphs s = v(x) over the resolved torus directions.
//
// In the flat chart g' = phi^{-2} g the graph is q = u(x) with u = q(v). For n=3 the grid axes
// are (xi, theta); for n=4 the surface is invariant under xi and the grid axes are
// (theta3, theta4), with the xi-direction handled in closed form ("axial" entries below).
//
// Sign convention: h(X, Y) = -g(nabla_X dF(Y), nu) with nu the unit normal pointing to increasing
// s, so coordinate tori have positive mean curvature.

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "geonflow/curvature_tables.hpp"
#include "geonflow/geon_background.hpp"
#include "geonflow/spectral.hpp"

namespace geonflow {

/// Immutable snapshot of a graph hypersurface. Snapshots from the same run share the radial
/// profile and the FFT workspace, so a lineage of surfaces must stay on one thread.
class GraphSurface {
 public:
  GraphSurface(GeonParams params, const PeriodicGrid& grid, Eigen::ArrayXXd v,
               std::shared_ptr<const RadialProfile> profile = nullptr,
               std::shared_ptr<const SpectralOps> ops = nullptr);

  const GeonParams& params() const { return params_; }
  int n() const { return params_.n(); }
  const PeriodicGrid& grid() const { return ops_->grid(); }
  const SpectralOps& ops() const { return *ops_; }
  const RadialProfile& profile() const { return *profile_; }
  std::shared_ptr<const RadialProfile> profile_ptr() const { return profile_; }
  std::shared_ptr<const SpectralOps> ops_ptr() const { return ops_; }

  /// Heights s = v(x).
  const Eigen::ArrayXXd& v() const { return v_; }
  /// Flat-chart heights q = u(x), computed lazily from the profile table.
  const Eigen::ArrayXXd& u() const;

  /// New snapshot on the same grid, profile and workspace.
  GraphSurface with_heights(Eigen::ArrayXXd v) const;

 private:
  GeonParams params_;
  Eigen::ArrayXXd v_;
  std::shared_ptr<const RadialProfile> profile_;
  std::shared_ptr<const SpectralOps> ops_;
  mutable std::shared_ptr<Eigen::ArrayXXd> u_;
};

/// Coordinate torus s = s0.
GraphSurface coordinate_torus(const GeonParams& params, const PeriodicGrid& grid, double s0);

/// One Fourier mode of initial data: amplitude * cos(k . x + phase) with integer wave numbers.
struct Mode {
  int k1 = 0;
  int k2 = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// v0 = s0 + sum of modes.
GraphSurface mode_surface(const GeonParams& params, const PeriodicGrid& grid, double s0,
                          const std::vector<Mode>& modes);

/// Symmetric 2-tensor field in grid-axis components. For n=4, `axial` is the xi-xi entry
/// (the mixed xi-grid entries vanish by symmetry); for n=3 it is empty.
struct SymmetricField {
  Eigen::ArrayXXd xx, xy, yy;
  Eigen::ArrayXXd axial;

  bool has_axial() const { return axial.size() > 0; }
  /// Largest absolute entry over the field.
  double max_abs() const;
};

SymmetricField operator-(const SymmetricField& a, const SymmetricField& b);

/// Pointwise geometric data of a graph: background quantities at s = v and the first and second
/// partials of u (obtained from those of v by the chain rule through dq/ds = 1/phi).
struct SurfaceGeometry {
  int n = 3;
  Eigen::ArrayXXd phi, dphi;  // phi(v), dphi/ds(v)
  Eigen::ArrayXXd psi, dpsi;  // Psi(v), dPsi/dq(v)
  Eigen::ArrayXXd ux, uy, uxx, uxy, uyy;
  Eigen::ArrayXXd rho;        // (1 + |du|_{g_hat}^2)^{1/2}
  double cell_weight = 0.0;   // integration weight per node (includes the xi-length for n=4)
  double mass = 0.0;          // total mass of the ambient geon
  std::shared_ptr<const SpectralOps> ops;

  /// |u_theta|^2: the theta part of |du|^2.
  Eigen::ArrayXXd theta_grad2() const;
  /// Inverse induced metric (gamma')^{ab}.
  SymmetricField inverse_metric() const;
  /// Induced metric gamma'_ab.
  SymmetricField metric() const;
};

SurfaceGeometry analyze(const GraphSurface& surface,
                        DerivativeMode mode = DerivativeMode::Spectral);

/// Slope rho = (1 + |du|_{g_hat}^2)^{1/2}.
Eigen::ArrayXXd slope(const GraphSurface& surface);

/// Hessian of u on the graph in the induced metric gamma' (closed form).
SymmetricField hessian_u(const SurfaceGeometry& geo);
SymmetricField hessian_u(const GraphSurface& surface);

/// Second fundamental form for g' computed directly from the graph.
SymmetricField second_form_gprime(const SurfaceGeometry& geo);
/// Same object assembled from the induced Hessian of u plus the axial correction.
SymmetricField second_form_from_hessian(const SurfaceGeometry& geo);

/// Second fundamental form of the graph in e^{2 psi} g'.
SymmetricField second_form(const SurfaceGeometry& geo, ConformalChoice choice);
SymmetricField second_form_direct(const GraphSurface& surface, ConformalChoice choice);

/// Laplacian of u on the graph, as the trace of hessian_u.
Eigen::ArrayXXd laplacian_u(const SurfaceGeometry& geo);
/// Laplacian of u in divergence form (1/sqrt det) d_a(sqrt det gamma'^{ab} u_b), spectrally.
Eigen::ArrayXXd laplacian_u_divergence(const SurfaceGeometry& geo);

/// Mean curvature of the graph in e^{2 psi} g' (sum of principal curvatures).
Eigen::ArrayXXd mean_curvature(const SurfaceGeometry& geo, ConformalChoice choice);
Eigen::ArrayXXd mean_curvature_g(const GraphSurface& surface);

/// Smallest eigenvalue of the Weingarten map at every node, and its global minimum.
Eigen::ArrayXXd weingarten_min_eig_field(const SurfaceGeometry& geo, ConformalChoice choice);
double weingarten_min_eig(const GraphSurface& surface, ConformalChoice choice);

/// Smallest eigenvalue of gamma'^{-1} D'D'u over the grid.
double min_hessian_eig(const SurfaceGeometry& geo);

/// Smallest eigenvalue at each node of the mixed tensor A^a_b = M^{ac} T_cb for symmetric
/// positive definite M (axial entries are treated as a separate 1x1 block).
Eigen::ArrayXXd min_mixed_eig(const SymmetricField& inv_metric, const SymmetricField& t);

}  // namespace geonflow
