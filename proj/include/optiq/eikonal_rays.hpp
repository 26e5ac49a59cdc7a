#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "optiq/grid.hpp"

namespace optiq::rays {

using Mat3 = Eigen::Matrix3d;

/// Refractive index n(x) > 0, given analytically or sampled on a grid.
///
/// The ray equations only need n^2, its gradient and its Hessian. Sampled
/// media interpolate n^2 trilinearly and differentiate the samples.
class MediumIndex {
 public:
  static MediumIndex constant(double n, double floor = 1e-6);
  /// n^2 = n0^2 + a * z.
  static MediumIndex linear(double a, double n0 = 1.0, double floor = 1e-6);
  /// Samples of n on a clamped grid; rays exit at the grid boundary.
  static MediumIndex sampled(const ScalarField& n, double floor = 1e-6);

  /// Restricts tracing to the axis-aligned box [lo, hi].
  MediumIndex& with_domain(const Vec3& lo, const Vec3& hi);

  double n(const Vec3& x) const;
  double n2(const Vec3& x) const;
  Vec3 grad_n2(const Vec3& x) const;
  Mat3 hess_n2(const Vec3& x) const;
  bool contains(const Vec3& x) const;
  double floor() const noexcept { return floor_; }
  double diameter() const;

 private:
  enum class Kind { constant, linear, sampled };
  Kind kind_ = Kind::constant;
  double n0_ = 1.0, a_ = 0.0, floor_ = 1e-6;
  std::optional<std::pair<Vec3, Vec3>> domain_;
  ScalarField n2_;
  VectorField3 grad_;
  std::array<VectorField3, 3> hess_;
};

struct RaySample {
  double tau = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 dx = Vec3::Zero();
  double phi = 0.0;
  /// Laplacian of the eikonal, tr(d grad Phi / dx) along the ray.
  double lap_phi = 0.0;
  /// Integral of lap_phi from the launch point.
  double lap_integral = 0.0;
  double J = 1.0;
  double amplitude = 1.0;
  bool caustic = false;
};

struct RayPath {
  std::vector<RaySample> samples;
  bool exited = false;
};

/// Traces x'' = grad(n^2)/2 by RK4 from x0 with |dx/dtau| = n(x0) along dir0.
/// `hess_phi0` is the launch Hessian of the eikonal; it is carried along the ray
/// through M' + M^2 = Hess(n^2)/2 to give lap_phi, which diverges at foci.
/// The path stops early, with `exited` set, when it leaves the medium's domain.
RayPath trace_ray(const Vec3& x0, const Vec3& dir0, const MediumIndex& medium, double tau0, double tau1,
                  double dtau, const Mat3& hess_phi0 = Mat3::Zero(), double phi0 = 0.0);

/// Launch condition: ray direction field around the central launch point.
struct RayBundle {
  Vec3 x0 = Vec3::Zero();
  std::function<Vec3(const Vec3&)> direction;
};

/// Rays leaving a point source at `source`, launched from `x0`.
RayBundle point_source_bundle(const Vec3& source, const Vec3& x0);
/// Parallel rays along `dir`.
RayBundle plane_bundle(const Vec3& x0, const Vec3& dir);

/// Traces the central ray of the bundle and the six rays launched from
/// x0 +- delta e_j, filling J = det(dx/dx0) by centered differences.
/// Samples with J <= 0 are flagged as caustics.
RayPath ray_jacobian(const RayBundle& bundle, const MediumIndex& medium, double tau0, double tau1, double dtau,
                     double delta);

struct TransportAmplitude {
  /// v0 exp(-1/2 integral lap_phi).
  std::vector<double> via_laplacian;
  /// v0 / sqrt(J), NaN at caustics.
  std::vector<double> via_jacobian;
  /// Largest relative gap between the two over samples with J > 0.1 that
  /// precede the first caustic.
  double max_relative_gap = 0.0;
};

TransportAmplitude transport_amplitude(const RayPath& path, double v0);
/// Copies the path with `amplitude` set from the Jacobian route.
RayPath with_amplitude(const RayPath& path, double v0);

struct EikonalSolution {
  ScalarField phi;
  ScalarField amplitude;
  double k = 1.0;
  double omega = 1.0;
  bool normalized = false;
};

/// Max |(grad Phi)^2 - n^2| over interior nodes, skipping nodes within 3h of
/// an optional point source.
double eikonal_residual(const EikonalSolution& sol, const MediumIndex& medium,
                        std::optional<Vec3> source = std::nullopt);

/// Scales v so that its integral of v^2 over the grid is 1.
ScalarField normalize_amplitude(const ScalarField& v);

struct GeometricDensity {
  ScalarField rho;
  /// j / E = v^2 grad Phi / 2.
  VectorField3 current;
};

GeometricDensity geometric_density_current(const EikonalSolution& sol);

/// eps = [k^2 v^2 + (k^2/n^2) v^2 ((grad Phi)^2 + (grad ln v)^2 / k^2)] / 2.
ScalarField geometric_energy_density(const EikonalSolution& sol, const MediumIndex& medium);

}  // namespace optiq::rays
