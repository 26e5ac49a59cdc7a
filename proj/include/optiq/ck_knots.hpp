#pragma once

#include <optional>
#include <string>
#include <vector>

#include "optiq/grid.hpp"

namespace optiq::ck {

/// Monochromatic amplitude F with curl F = k F, plus how it was built.
struct CKField {
  VectorField3 F;
  double k = 0.0;
  /// Generating-potential parameters when built by ck_build_cylinder.
  int m = 0;
  double kz = 0.0;
  /// Radial wavenumber sqrt(k^2 - kz^2).
  double gamma = 0.0;
};

/// F = -(i/k) (k T + curl T), T = curl(psi z), psi = J_m(gamma rho) e^{i m phi} e^{i kz z},
/// rho and phi measured about the z axis through `axis`. At z = axis.z,
/// r . F = J_m(gamma rho) e^{i m phi} (exact for m = 1, kz = 0).
CKField ck_build_cylinder(const Grid& grid, double k, int m, double kz, const Vec3& axis = Vec3::Zero());

/// Wraps an arbitrary field for the diagnostics below.
CKField ck_wrap(VectorField3 F, double k);

/// max |curl F - k F| / max |F| over interior nodes; 0 for F = 0.
double force_free_residual(const CKField& f);
/// max |div F| / (k max |F|) over interior nodes.
double divergence_residual(const CKField& f);
/// max |lap F + k^2 F| / (k^2 max |F|) over interior nodes.
double vector_helmholtz_residual(const CKField& f);

struct NullDiagnostics {
  /// |E|^2 - |H|^2.
  ScalarField d1;
  /// E . H.
  ScalarField d2;
};

/// E and H read from F = (E + i H)/sqrt(2).
NullDiagnostics null_check(const CKField& f);

struct RadialScalarPair {
  ScalarField u1;
  ScalarField u2;
  double k2 = 0.0;
};

/// u = r . F with r measured from `origin`; throws on a vanishing u.
RadialScalarPair radial_scalar(const CKField& f, const Vec3& origin = Vec3::Zero());

/// max |(lap + k^2) u| / (k^2 max |u|) over interior nodes.
double helmholtz_residual(const ScalarField& u, double k2);

struct Curve3D {
  std::vector<Vec3> points;
  bool closed = false;

  double length() const;
  double max_segment() const;
};

struct NodalOptions {
  /// Predictor step; defaults to half the grid spacing.
  double step = 0.0;
  double newton_tolerance = 1e-10;
  int newton_iterations = 20;
  /// Transversality threshold; defaults to 1e-6 max|grad u1| max|grad u2|.
  double eps_t = 0.0;
  std::size_t max_points = 100000;
};

struct NodalReport {
  std::vector<Curve3D> curves;
  /// Candidate points rejected because |grad u1 x grad u2| fell below eps_t.
  std::vector<Vec3> skipped;
  double eps_t = 0.0;
};

/// The curves {u1 = 0} and {u2 = 0} meet on: seeds from cells where both
/// change sign, predictor along grad u1 x grad u2, minimum-norm Newton
/// corrector. Fields are interpolated trilinearly.
NodalReport nodal_intersection(const RadialScalarPair& p, const NodalOptions& opts = {});

struct TraceOptions {
  /// Arc-length step; defaults to a quarter of the smallest spacing.
  double step = 0.0;
  /// Closure distance; defaults to twice the largest spacing.
  double closure = 0.0;
  /// Stagnation threshold; defaults to 1e-9 max |v|.
  double floor = 0.0;
};

/// Streamline of the real part of v by RK4 on dx/ds = v/|v| with trilinear
/// interpolation. Stops on closure near x0, on leaving the grid, or at max_length.
Curve3D trace_field_line(const VectorField3& v, const Vec3& x0, double max_length, const TraceOptions& opts = {});

struct Torus {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double major = 1.0;
  /// Radius of the tube the curve must stay in.
  double tube = 0.5;
};

struct Winding {
  int p = 0;
  int q = 0;
  /// Accumulated toroidal and poloidal angles over 2 pi, before rounding.
  double raw_p = 0.0;
  double raw_q = 0.0;
};

/// Accumulated turns of any curve inside the tube (closing segment included
/// for closed curves); p and q are the rounded raw values.
Winding torus_angles(const Curve3D& c, const Torus& torus);

/// Field tangent to the tori around a circle of radius `major` in the z = 0 plane,
/// advancing `kappa` poloidal radians per toroidal radian.
VectorField3 torus_field(const Grid& grid, double kappa, double major = 1.0);

/// Toroidal (p) and poloidal (q) turns of a closed curve inside the tube.
/// Throws unless both raw values are within 1e-3 of integers.
Winding torus_winding(const Curve3D& c, const Torus& torus);

struct LinkReport {
  double raw = 0.0;
  int linking = 0;
  double gap = 0.0;
  bool reliable = true;
};

/// Gauss linking integral of two closed polygons, evaluated exactly per
/// segment pair by the solid-angle formula.
LinkReport linking_number(const Curve3D& a, const Curve3D& b);

struct Fraction {
  long num = 0;
  long den = 1;
  double error = 0.0;
};

/// Best continued-fraction approximation with denominator at most max_den.
Fraction rationalize(double x, long max_den = 12);

/// Rows "curve,closed,x,y,z".
std::string curves_csv(const std::vector<Curve3D>& curves);

}  // namespace optiq::ck
