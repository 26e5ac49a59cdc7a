#include "optiq/eikonal_rays.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace optiq::rays {

namespace {

// x(3) p(3) phi(1) M(9) integral of tr M (1)
using RayState = Eigen::Matrix<double, 17, 1>;

RayState derivative(const RayState& s, const MediumIndex& medium) {
  const Vec3 x = s.segment<3>(0);
  const Vec3 p = s.segment<3>(3);
  const Eigen::Map<const Mat3> M(s.data() + 7);
  RayState d;
  d.segment<3>(0) = p;
  d.segment<3>(3) = 0.5 * medium.grad_n2(x);
  d(6) = p.squaredNorm();
  Eigen::Map<Mat3>(d.data() + 7) = 0.5 * medium.hess_n2(x) - M * M;
  d(16) = M.trace();
  return d;
}

RaySample to_sample(const RayState& s, double tau) {
  RaySample r;
  r.tau = tau;
  r.x = s.segment<3>(0);
  r.dx = s.segment<3>(3);
  r.phi = s(6);
  r.lap_phi = Eigen::Map<const Mat3>(s.data() + 7).trace();
  r.lap_integral = s(16);
  return r;
}

Vec3 launch_momentum(const RayBundle& b, const MediumIndex& medium, const Vec3& x) {
  const Vec3 d = b.direction(x);
  const double len = d.norm();
  if (!(len > 0.0) || !std::isfinite(len)) throw ContractError("bundle direction must be a non-zero vector");
  return medium.n(x) / len * d;
}

}  // namespace

MediumIndex MediumIndex::constant(double n, double floor) {
  if (!(floor > 0.0)) throw ContractError("index floor must be positive");
  if (!(n >= floor) || !std::isfinite(n)) throw ContractError("refractive index below floor");
  MediumIndex m;
  m.kind_ = Kind::constant;
  m.n0_ = n;
  m.floor_ = floor;
  return m;
}

MediumIndex MediumIndex::linear(double a, double n0, double floor) {
  if (!(floor > 0.0)) throw ContractError("index floor must be positive");
  if (!(n0 >= floor) || !std::isfinite(a)) throw ContractError("invalid linear index profile");
  MediumIndex m;
  m.kind_ = Kind::linear;
  m.n0_ = n0;
  m.a_ = a;
  m.floor_ = floor;
  return m;
}

MediumIndex MediumIndex::sampled(const ScalarField& n, double floor) {
  if (!(floor > 0.0)) throw ContractError("index floor must be positive");
  require_finite(n, "refractive index");
  const Grid& g = n.grid();
  for (int a = 0; a < g.dim(); ++a)
    if (g.boundary(a) != Boundary::clamped) throw ContractError("sampled media require clamped grids");
  MediumIndex m;
  m.kind_ = Kind::sampled;
  m.floor_ = floor;
  m.n2_ = ScalarField(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (n[i].imag() != 0.0 || !(n[i].real() >= floor)) throw ContractError("refractive index below floor");
    m.n2_[i] = n[i].real() * n[i].real();
  }
  m.grad_ = gradient(m.n2_);
  for (int a = 0; a < 3; ++a) m.hess_[a] = gradient(m.grad_[a]);
  Vec3 lo = Vec3::Zero(), hi = Vec3::Zero();
  for (int a = 0; a < g.dim(); ++a) lo[a] = g.origin(a), hi[a] = g.coord(a, g.count(a) - 1);
  m.domain_ = {lo, hi};
  return m;
}

MediumIndex& MediumIndex::with_domain(const Vec3& lo, const Vec3& hi) {
  if (!(lo.array() <= hi.array()).all()) throw ContractError("empty medium domain");
  domain_ = {lo, hi};
  return *this;
}

double MediumIndex::n2(const Vec3& x) const {
  switch (kind_) {
    case Kind::constant: return n0_ * n0_;
    case Kind::linear: return n0_ * n0_ + a_ * x.z();
    case Kind::sampled: return interpolate(n2_, x).real();
  }
  return 0.0;
}

double MediumIndex::n(const Vec3& x) const {
  const double v = n2(x);
  if (!(v >= floor_ * floor_)) throw ContractError("refractive index below floor");
  return std::sqrt(v);
}

Vec3 MediumIndex::grad_n2(const Vec3& x) const {
  switch (kind_) {
    case Kind::constant: return Vec3::Zero();
    case Kind::linear: return {0.0, 0.0, a_};
    case Kind::sampled:
      return {interpolate(grad_[0], x).real(), interpolate(grad_[1], x).real(), interpolate(grad_[2], x).real()};
  }
  return Vec3::Zero();
}

Mat3 MediumIndex::hess_n2(const Vec3& x) const {
  if (kind_ != Kind::sampled) return Mat3::Zero();
  Mat3 h;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) h(a, b) = interpolate(hess_[a][b], x).real();
  return 0.5 * (h + h.transpose());
}

bool MediumIndex::contains(const Vec3& x) const {
  if (!domain_) return true;
  return (x.array() >= domain_->first.array()).all() && (x.array() <= domain_->second.array()).all();
}

double MediumIndex::diameter() const {
  if (!domain_) return 1.0;
  return (domain_->second - domain_->first).norm();
}

RayPath trace_ray(const Vec3& x0, const Vec3& dir0, const MediumIndex& medium, double tau0, double tau1,
                  double dtau, const Mat3& hess_phi0, double phi0) {
  if (!(dtau > 0.0) || !(tau1 > tau0)) throw ContractError("ray parameter span must be increasing");
  if (!(dir0.norm() > 0.0)) throw ContractError("launch direction must be non-zero");
  if (!medium.contains(x0)) throw ContractError("launch point outside the medium");
  const int steps = std::max(1, static_cast<int>(std::ceil((tau1 - tau0) / dtau - 1e-9)));
  const double h = (tau1 - tau0) / steps;

  RayState s;
  s.segment<3>(0) = x0;
  s.segment<3>(3) = medium.n(x0) * dir0.normalized();
  s(6) = phi0;
  Eigen::Map<Mat3>(s.data() + 7) = hess_phi0;
  s(16) = 0.0;

  RayPath path;
  path.samples.reserve(static_cast<std::size_t>(steps) + 1);
  path.samples.push_back(to_sample(s, tau0));
  for (int i = 1; i <= steps; ++i) {
    const RayState k1 = derivative(s, medium);
    const RayState k2 = derivative(s + 0.5 * h * k1, medium);
    const RayState k3 = derivative(s + 0.5 * h * k2, medium);
    const RayState k4 = derivative(s + h * k3, medium);
    const RayState next = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.head<7>().allFinite() || !medium.contains(next.segment<3>(0))) {
      path.exited = true;
      break;
    }
    if (!(medium.n2(next.segment<3>(0)) >= medium.floor() * medium.floor()))
      throw ContractError("refractive index below floor along the ray");
    s = next;
    path.samples.push_back(to_sample(s, tau0 + i * h));
  }
  return path;
}

RayBundle point_source_bundle(const Vec3& source, const Vec3& x0) {
  if (!((x0 - source).norm() > 0.0)) throw ContractError("launch point coincides with the source");
  return {x0, [source](const Vec3& x) -> Vec3 { return x - source; }};
}

RayBundle plane_bundle(const Vec3& x0, const Vec3& dir) {
  if (!(dir.norm() > 0.0)) throw ContractError("bundle direction must be non-zero");
  return {x0, [dir](const Vec3&) -> Vec3 { return dir; }};
}

RayPath ray_jacobian(const RayBundle& bundle, const MediumIndex& medium, double tau0, double tau1, double dtau,
                     double delta) {
  if (!(delta > 0.0)) throw ContractError("bundle offset must be positive");
  if (!bundle.direction) throw ContractError("bundle has no direction field");

  // Launch Hessian of Phi: derivative of the launch momentum field.
  Mat3 m0;
  for (int j = 0; j < 3; ++j) {
    const Vec3 e = delta * Vec3::Unit(j);
    m0.col(j) = (launch_momentum(bundle, medium, bundle.x0 + e) - launch_momentum(bundle, medium, bundle.x0 - e)) /
                (2.0 * delta);
  }
  RayPath central =
      trace_ray(bundle.x0, launch_momentum(bundle, medium, bundle.x0), medium, tau0, tau1, dtau, m0);

  std::array<RayPath, 6> offsets;
  std::size_t len = central.samples.size();
  for (int j = 0; j < 3; ++j)
    for (int s = 0; s < 2; ++s) {
      const Vec3 x = bundle.x0 + (s == 0 ? delta : -delta) * Vec3::Unit(j);
      offsets[2 * j + s] = trace_ray(x, launch_momentum(bundle, medium, x), medium, tau0, tau1, dtau);
      len = std::min(len, offsets[2 * j + s].samples.size());
    }
  if (len < central.samples.size()) {
    central.samples.resize(len);
    central.exited = true;
  }
  for (std::size_t i = 0; i < len; ++i) {
    Mat3 d;
    for (int j = 0; j < 3; ++j) d.col(j) = (offsets[2 * j].samples[i].x - offsets[2 * j + 1].samples[i].x) / (2.0 * delta);
    RaySample& r = central.samples[i];
    r.J = d.determinant();
    r.caustic = !(r.J > 0.0);
  }
  return central;
}

TransportAmplitude transport_amplitude(const RayPath& path, double v0) {
  if (!std::isfinite(v0)) throw ContractError("launch amplitude must be finite");
  TransportAmplitude out;
  out.via_laplacian.reserve(path.samples.size());
  out.via_jacobian.reserve(path.samples.size());
  bool past_caustic = false;
  for (const auto& s : path.samples) {
    past_caustic |= s.caustic;
    const double a = v0 * std::exp(-0.5 * s.lap_integral);
    const double b = s.caustic ? std::numeric_limits<double>::quiet_NaN() : v0 / std::sqrt(s.J);
    out.via_laplacian.push_back(a);
    out.via_jacobian.push_back(b);
    if (!past_caustic && s.J > 0.1 && std::isfinite(a) && b != 0.0)
      out.max_relative_gap = std::max(out.max_relative_gap, std::abs(a - b) / std::abs(b));
  }
  return out;
}

RayPath with_amplitude(const RayPath& path, double v0) {
  const auto t = transport_amplitude(path, v0);
  RayPath out = path;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i].amplitude = t.via_jacobian[i];
  return out;
}

double eikonal_residual(const EikonalSolution& sol, const MediumIndex& medium, std::optional<Vec3> source) {
  require_finite(sol.phi, "eikonal");
  const Grid& g = sol.phi.grid();
  double hmax = 0.0;
  for (int a = 0; a < g.dim(); ++a) hmax = std::max(hmax, g.spacing(a));
  const VectorField3 grad = gradient(sol.phi.real_part());
  double worst = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.boundary_distance(g.unravel(n)) < 1) continue;
    const Vec3 x = g.position(n);
    if (source && (x - *source).norm() < 3.0 * hmax) continue;
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += grad[a][n].real() * grad[a][n].real();
    worst = std::max(worst, std::abs(s - medium.n2(x)));
  }
  return worst;
}

ScalarField normalize_amplitude(const ScalarField& v) {
  require_finite(v, "amplitude");
  ScalarField sq(v.grid());
  for (std::size_t n = 0; n < v.size(); ++n) sq[n] = std::norm(v[n]);
  const double norm = integrate(sq).real();
  if (!(norm > 0.0)) throw ContractError("null amplitude norm");
  return v * (1.0 / std::sqrt(norm));
}

GeometricDensity geometric_density_current(const EikonalSolution& sol) {
  require_same_grid(sol.phi.grid(), sol.amplitude.grid(), "eikonal solution");
  require_finite(sol.phi, "eikonal");
  require_finite(sol.amplitude, "amplitude");
  const Grid& g = sol.phi.grid();
  ScalarField v2(g);
  for (std::size_t n = 0; n < g.size(); ++n) v2[n] = std::norm(sol.amplitude[n]);
  const double total = integrate(v2).real();
  if (!(total > 0.0)) throw ContractError("null amplitude norm");
  GeometricDensity out{v2 * (1.0 / total), gradient(sol.phi.real_part())};
  for (int a = 0; a < 3; ++a) out.current[a] *= v2 * 0.5;
  return out;
}

ScalarField geometric_energy_density(const EikonalSolution& sol, const MediumIndex& medium) {
  require_same_grid(sol.phi.grid(), sol.amplitude.grid(), "eikonal solution");
  if (!(sol.k > 0.0)) throw ContractError("wavenumber must be positive");
  const Grid& g = sol.phi.grid();
  const ScalarField v = sol.amplitude.real_part();
  for (std::size_t n = 0; n < g.size(); ++n)
    if (!(v[n].real() > 0.0)) throw ContractError("amplitude must be positive for ln v");
  const VectorField3 gphi = gradient(sol.phi.real_part());
  const VectorField3 gv = gradient(v);
  const double k2 = sol.k * sol.k;
  ScalarField eps(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double vn = v[n].real();
    double phi2 = 0.0, lnv2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      phi2 += gphi[a][n].real() * gphi[a][n].real();
      const double d = gv[a][n].real() / vn;
      lnv2 += d * d;
    }
    const double n2 = medium.n2(g.position(n));
    eps[n] = 0.5 * (k2 * vn * vn + k2 / n2 * vn * vn * (phi2 + lnv2 / k2));
  }
  return eps;
}

}  // namespace optiq::rays
