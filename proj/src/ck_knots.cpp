#include "optiq/ck_knots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

namespace optiq::ck {

namespace {

using std::numbers::pi;
const Complex I(0.0, 1.0);

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * std::cyl_bessel_j(-n, x);
  return std::cyl_bessel_j(n, x);
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a;
}

// Trilinear samples of real fields.
double real_at(const ScalarField& f, const Vec3& x) { return interpolate(f, x).real(); }

Vec3 real_at(const VectorField3& v, const Vec3& x) {
  return {interpolate(v[0], x).real(), interpolate(v[1], x).real(), interpolate(v[2], x).real()};
}

double max_norm(const VectorField3& v) { return v.max_abs(); }

struct Sample {
  Eigen::Vector2d u;
  Eigen::Matrix<double, 2, 3> J;
  Vec3 cross() const { return Vec3(J.row(0).transpose()).cross(Vec3(J.row(1).transpose())); }
};

class PairField {
 public:
  explicit PairField(const RadialScalarPair& p)
      : u1_(p.u1.real_part()), u2_(p.u2.real_part()), g1_(gradient(u1_)), g2_(gradient(u2_)) {
    scale_ = {std::max(u1_.max_abs(), 1e-300), std::max(u2_.max_abs(), 1e-300)};
  }

  Sample at(const Vec3& x) const {
    Sample s;
    s.u = {real_at(u1_, x), real_at(u2_, x)};
    s.J.row(0) = real_at(g1_, x).transpose();
    s.J.row(1) = real_at(g2_, x).transpose();
    return s;
  }

  bool small(const Sample& s, double tol) const {
    return std::abs(s.u[0]) <= tol * scale_[0] && std::abs(s.u[1]) <= tol * scale_[1];
  }

  const ScalarField& u1() const { return u1_; }
  const ScalarField& u2() const { return u2_; }
  double grad_scale() const { return max_norm(g1_) * max_norm(g2_); }

 private:
  ScalarField u1_, u2_;
  VectorField3 g1_, g2_;
  Eigen::Vector2d scale_;
};

// Minimum-norm Newton iteration onto {u1 = 0, u2 = 0}.
std::optional<Vec3> correct(const PairField& f, Vec3 x, const NodalOptions& o) {
  for (int it = 0; it <= o.newton_iterations; ++it) {
    const Sample s = f.at(x);
    if (f.small(s, o.newton_tolerance)) return x;
    // Least-squares minimum-norm step, defined even where the gradients are parallel.
    const Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 2, 3>> cod(s.J);
    x -= cod.solve(s.u);
    if (!x.allFinite()) return std::nullopt;
  }
  return std::nullopt;
}

// Exact closest distance between segments p1p2 and q1q2.
double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2) {
  const Vec3 d1 = p2 - p1, d2 = q2 - q1, r = p1 - q1;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), den = a * e - b * b;
      s = den > 0.0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p1 + s * d1) - (q1 + t * d2)).norm();
}

Vec3 unit_or_zero(const Vec3& v) {
  const double n = v.norm();
  return n > 0.0 ? Vec3(v / n) : Vec3::Zero();
}

// Gauss integral of two straight segments: signed solid angle over 4 pi.
double segment_pair_link(const Vec3& p1, const Vec3& p2, const Vec3& p3, const Vec3& p4) {
  const Vec3 r13 = p3 - p1, r14 = p4 - p1, r23 = p3 - p2, r24 = p4 - p2;
  const Vec3 n1 = unit_or_zero(r13.cross(r14));
  const Vec3 n2 = unit_or_zero(r14.cross(r24));
  const Vec3 n3 = unit_or_zero(r24.cross(r23));
  const Vec3 n4 = unit_or_zero(r23.cross(r13));
  auto as = [](double v) { return std::asin(std::clamp(v, -1.0, 1.0)); };
  const double omega = as(n1.dot(n2)) + as(n2.dot(n3)) + as(n3.dot(n4)) + as(n4.dot(n1));
  const double orient = ((p4 - p3).cross(p2 - p1)).dot(r13);
  if (orient == 0.0) return 0.0;
  return (orient > 0.0 ? omega : -omega) / (4.0 * pi);
}

std::size_t segment_count(const Curve3D& c) {
  if (c.points.size() < 2) return 0;
  return c.closed ? c.points.size() : c.points.size() - 1;
}

const Vec3& seg_end(const Curve3D& c, std::size_t i) { return c.points[(i + 1) % c.points.size()]; }

}  // namespace

CKField ck_build_cylinder(const Grid& grid, double k, int m, double kz, const Vec3& axis) {
  if (!std::isfinite(k) || !std::isfinite(kz) || k == 0.0) throw ContractError("wavenumber must be finite and nonzero");
  if (!(k * k > kz * kz)) throw ContractError("evanescent radial profile: need k^2 > kz^2");
  if (grid.dim() != 3) throw ContractError("CK fields live on 3D grids");
  CKField f;
  f.k = k;
  f.m = m;
  f.kz = kz;
  f.gamma = std::sqrt(k * k - kz * kz);
  const double gam = f.gamma;
  f.F = VectorField3::sample(grid, [&](const Vec3& p) {
    const Vec3 d = p - axis;
    const double rho = std::hypot(d.x(), d.y());
    const double phi = std::atan2(d.y(), d.x());
    const double x = gam * rho;
    const double jm = bessel_j(m, x);
    const double djm = 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x));
    // m J_m(x)/x, regular at the axis.
    const double mj_over_x = m == 0 ? 0.0 : 0.5 * (bessel_j(m - 1, x) + bessel_j(m + 1, x));
    const Complex phase = std::exp(I * (m * phi + kz * d.z()));
    const double c = std::cos(phi), s = std::sin(phi);
    const Complex dx = (c * gam * djm - I * s * gam * mj_over_x) * phase;
    const Complex dy = (s * gam * djm + I * c * gam * mj_over_x) * phase;
    const Complex psi = jm * phase;
    const Complex T[3] = {dy, -dx, 0.0};
    const Complex P[3] = {I * kz * dx, I * kz * dy, gam * gam * psi};
    std::array<Complex, 3> out;
    for (int a = 0; a < 3; ++a) out[a] = -I / k * (k * T[a] + P[a]);
    return out;
  });
  return f;
}

CKField ck_wrap(VectorField3 F, double k) {
  if (!std::isfinite(k)) throw ContractError("wavenumber must be finite");
  require_finite(F, "CK field");
  CKField f;
  f.F = std::move(F);
  f.k = k;
  return f;
}

double force_free_residual(const CKField& f) {
  const double m = f.F.max_abs();
  if (m == 0.0) return 0.0;
  return max_abs_interior(curl(f.F) - f.F * f.k, 1) / m;
}

double divergence_residual(const CKField& f) {
  const double m = f.F.max_abs();
  if (m == 0.0) return 0.0;
  return max_abs_interior(divergence(f.F), 1) / (std::abs(f.k) * m);
}

double vector_helmholtz_residual(const CKField& f) {
  const double m = f.F.max_abs();
  if (m == 0.0) return 0.0;
  VectorField3 r(f.F.grid());
  for (int a = 0; a < 3; ++a) r[a] = laplacian(f.F[a]) + f.F[a] * (f.k * f.k);
  return max_abs_interior(r, 1) / (f.k * f.k * m);
}

NullDiagnostics null_check(const CKField& f) {
  const Grid& g = f.F.grid();
  NullDiagnostics d{ScalarField(g), ScalarField(g)};
  const double r2 = std::sqrt(2.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    double e2 = 0.0, h2 = 0.0, eh = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double e = r2 * f.F[a][n].real(), h = r2 * f.F[a][n].imag();
      e2 += e * e;
      h2 += h * h;
      eh += e * h;
    }
    d.d1[n] = e2 - h2;
    d.d2[n] = eh;
  }
  return d;
}

RadialScalarPair radial_scalar(const CKField& f, const Vec3& origin) {
  const Grid& g = f.F.grid();
  ScalarField u(g);
  double extent = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 r = g.position(n) - origin;
    extent = std::max(extent, r.norm());
    u[n] = r.x() * f.F[0][n] + r.y() * f.F[1][n] + r.z() * f.F[2][n];
  }
  if (u.max_abs() <= 1e-12 * f.F.max_abs() * extent) throw ContractError("degenerate radial scalar: r . F vanishes");
  return {u.real_part(), u.imag_part(), f.k * f.k};
}

double helmholtz_residual(const ScalarField& u, double k2) {
  const double m = u.max_abs();
  if (m == 0.0) return 0.0;
  return max_abs_interior(laplacian(u) + u * k2, 1) / (std::max(std::abs(k2), 1e-300) * m);
}

double Curve3D::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i < segment_count(*this); ++i) s += (seg_end(*this, i) - points[i]).norm();
  return s;
}

double Curve3D::max_segment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < segment_count(*this); ++i) s = std::max(s, (seg_end(*this, i) - points[i]).norm());
  return s;
}

NodalReport nodal_intersection(const RadialScalarPair& pair, const NodalOptions& opts) {
  const Grid& g = pair.u1.grid();
  require_same_grid(g, pair.u2.grid(), "nodal intersection");
  if (g.dim() != 3) throw ContractError("nodal intersection needs a 3D grid");
  const PairField field(pair);
  NodalOptions o = opts;
  if (o.step <= 0.0) o.step = 0.5 * g.min_spacing();
  NodalReport report;
  report.eps_t = o.eps_t > 0.0 ? o.eps_t : 1e-6 * field.grad_scale();
  const double eps_t = report.eps_t;

  const int nx = g.count(0), ny = g.count(1), nz = g.count(2);
  const int cx = nx - 1, cy = ny - 1, cz = nz - 1;
  auto cell_of = [&](const Vec3& x, int out[3]) {
    for (int a = 0; a < 3; ++a)
      out[a] = std::clamp(static_cast<int>(std::floor((x[a] - g.origin(a)) / g.spacing(a))), 0, g.count(a) - 2);
  };
  std::vector<char> covered(static_cast<std::size_t>(cx) * cy * cz, 0);
  auto cover = [&](const Vec3& x) {
    int c[3];
    cell_of(x, c);
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
          if (i < 0 || j < 0 || k < 0 || i >= cx || j >= cy || k >= cz) continue;
          covered[static_cast<std::size_t>(i) + static_cast<std::size_t>(cx) * (j + static_cast<std::size_t>(cy) * k)] = 1;
        }
  };

  auto tangent = [&](const Sample& s) -> std::optional<Vec3> {
    const Vec3 t = s.cross();
    if (t.norm() <= eps_t) return std::nullopt;
    return Vec3(t.normalized());
  };

  // Walks from x0 along `dir`; returns the points after x0 and whether the walk closed.
  auto walk = [&](const Vec3& x0, Vec3 dir, std::vector<Vec3>& pts) {
    Vec3 x = x0;
    while (pts.size() < o.max_points) {
      std::optional<Vec3> next;
      for (double h = o.step; h >= o.step / 16 && !next; h *= 0.5) next = correct(field, x + h * dir, o);
      if (!next || !grid_contains(g, *next)) return false;
      const Sample s = field.at(*next);
      const auto t = tangent(s);
      if (!t) {
        report.skipped.push_back(*next);
        return false;
      }
      if (pts.size() > 3 && (*next - x0).norm() < o.step) return true;
      dir = t->dot(dir) >= 0.0 ? *t : Vec3(-*t);
      x = *next;
      pts.push_back(x);
      cover(x);
    }
    return false;
  };

  const auto& u1 = field.u1();
  const auto& u2 = field.u2();
  for (int k = 0; k < cz; ++k)
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cx; ++i) {
        if (covered[static_cast<std::size_t>(i) + static_cast<std::size_t>(cx) * (j + static_cast<std::size_t>(cy) * k)])
          continue;
        double lo1 = INFINITY, hi1 = -INFINITY, lo2 = INFINITY, hi2 = -INFINITY;
        for (int c = 0; c < 8; ++c) {
          const std::size_t idx = g.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          lo1 = std::min(lo1, u1[idx].real());
          hi1 = std::max(hi1, u1[idx].real());
          lo2 = std::min(lo2, u2[idx].real());
          hi2 = std::max(hi2, u2[idx].real());
        }
        auto straddles = [](double lo, double hi) { return lo <= 0.0 && hi >= 0.0 && (lo < 0.0 || hi > 0.0); };
        if (!straddles(lo1, hi1) || !straddles(lo2, hi2)) continue;
        const Vec3 centre = g.position(i, j, k) + 0.5 * Vec3(g.spacing(0), g.spacing(1), g.spacing(2));
        const auto seed = correct(field, centre, o);
        if (!seed || !grid_contains(g, *seed)) continue;
        if (((*seed - centre).array().abs() > 1.5 * Vec3(g.spacing(0), g.spacing(1), g.spacing(2)).array()).any())
          continue;
        const auto t = tangent(field.at(*seed));
        if (!t) {
          report.skipped.push_back(*seed);
          cover(*seed);
          continue;
        }
        cover(*seed);
        std::vector<Vec3> fwd, back;
        Curve3D c;
        c.closed = walk(*seed, *t, fwd);
        if (!c.closed) walk(*seed, -*t, back);
        c.points.assign(back.rbegin(), back.rend());
        c.points.push_back(*seed);
        c.points.insert(c.points.end(), fwd.begin(), fwd.end());
        report.curves.push_back(std::move(c));
      }
  return report;
}

Curve3D trace_field_line(const VectorField3& v, const Vec3& x0, double max_length, const TraceOptions& opts) {
  const Grid& g = v.grid();
  if (!(max_length > 0.0)) throw ContractError("maximum length must be positive");
  if (!grid_contains(g, x0)) throw ContractError("start point lies outside the grid");
  const VectorField3 w = v.real_part();
  double hmax = 0.0;
  for (int a = 0; a < g.dim(); ++a) hmax = std::max(hmax, g.spacing(a));
  const double step = opts.step > 0.0 ? opts.step : 0.25 * g.min_spacing();
  const double closure = opts.closure > 0.0 ? opts.closure : 2.0 * hmax;
  const double floor = opts.floor > 0.0 ? opts.floor : 1e-9 * w.max_abs();
  auto dir = [&](const Vec3& x) {
    const Vec3 f = real_at(w, x);
    const double n = f.norm();
    if (!(n > floor)) throw ContractError("stagnation: field vanishes along the line");
    return Vec3(f / n);
  };

  Curve3D c;
  c.points.push_back(x0);
  const Vec3 d0 = dir(x0);
  Vec3 x = x0;
  double travelled = 0.0;
  bool left = false;
  while (travelled < max_length) {
    const Vec3 k1 = dir(x);
    const Vec3 a = x + 0.5 * step * k1;
    if (!grid_contains(g, a)) break;
    const Vec3 k2 = dir(a);
    const Vec3 b = x + 0.5 * step * k2;
    if (!grid_contains(g, b)) break;
    const Vec3 k3 = dir(b);
    const Vec3 e = x + step * k3;
    if (!grid_contains(g, e)) break;
    const Vec3 k4 = dir(e);
    const Vec3 next = x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!grid_contains(g, next)) break;
    const double dist_now = (x - x0).norm(), dist_next = (next - x0).norm();
    if (left && dist_now < closure && dist_next >= dist_now && dir(x).dot(d0) > 0.99) {
      c.closed = true;
      // The last point is the closest approach; the closing segment joins it to x0.
      if (dist_now < 0.5 * step && c.points.size() > 2) c.points.pop_back();
      break;
    }
    x = next;
    travelled += step;
    c.points.push_back(x);
    if (dist_next > 2.0 * closure) left = true;
  }
  return c;
}

Winding torus_angles(const Curve3D& c, const Torus& torus) {
  if (c.points.size() < 2) throw ContractError("curve needs at least two points");
  const Vec3 a = torus.axis.normalized();
  const Vec3 e1 = unit_or_zero(a.unitOrthogonal());
  const Vec3 e2 = a.cross(e1);
  auto angles = [&](const Vec3& x) {
    const Vec3 d = x - torus.center;
    const double z = d.dot(a), px = d.dot(e1), py = d.dot(e2);
    const double rho = std::hypot(px, py);
    if (std::hypot(rho - torus.major, z) >= torus.tube) throw ContractError("curve leaves the torus tube");
    return std::pair{std::atan2(py, px), std::atan2(z, rho - torus.major)};
  };
  double th = 0.0, ph = 0.0;
  auto prev = angles(c.points.front());
  const std::size_t n = c.points.size();
  for (std::size_t i = 1; i <= (c.closed ? n : n - 1); ++i) {
    const auto cur = angles(c.points[i % n]);
    th += wrap_angle(cur.first - prev.first);
    ph += wrap_angle(cur.second - prev.second);
    prev = cur;
  }
  Winding w;
  w.raw_p = th / (2.0 * pi);
  w.raw_q = ph / (2.0 * pi);
  w.p = static_cast<int>(std::lround(w.raw_p));
  w.q = static_cast<int>(std::lround(w.raw_q));
  return w;
}

Winding torus_winding(const Curve3D& c, const Torus& torus) {
  if (!c.closed) throw ContractError("winding numbers need a closed curve");
  const Winding w = torus_angles(c, torus);
  if (std::abs(w.raw_p - w.p) > 1e-3 || std::abs(w.raw_q - w.q) > 1e-3)
    throw ContractError("accumulated torus angles are not whole turns");
  return w;
}

LinkReport linking_number(const Curve3D& a, const Curve3D& b) {
  if (!a.closed || !b.closed || a.points.size() < 3 || b.points.size() < 3)
    throw ContractError("linking needs two closed curves");
  const double seg = std::max(a.max_segment(), b.max_segment());
  const std::size_t na = segment_count(a), nb = segment_count(b);
  double dmin = INFINITY;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      dmin = std::min(dmin, segment_distance(a.points[i], seg_end(a, i), b.points[j], seg_end(b, j)));
  if (!(dmin > 3.0 * seg)) throw ContractError("curves too close for a reliable linking integral");
  double raw = 0.0;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) raw += segment_pair_link(a.points[i], seg_end(a, i), b.points[j], seg_end(b, j));
  LinkReport r;
  r.raw = raw;
  r.linking = static_cast<int>(std::lround(raw));
  r.gap = std::abs(raw - r.linking);
  r.reliable = r.gap < 0.1;
  return r;
}

VectorField3 torus_field(const Grid& grid, double kappa, double major) {
  if (!std::isfinite(kappa) || !(major > 0.0)) throw ContractError("torus field needs a finite slope and a positive radius");
  return VectorField3::sample(grid, [&](const Vec3& x) {
    const double rho = std::hypot(x.x(), x.y());
    const double th = std::atan2(x.y(), x.x());
    const double ph = std::atan2(x.z(), rho - major);
    const double r = std::hypot(rho - major, x.z());
    const Vec3 dth = rho * Vec3(-std::sin(th), std::cos(th), 0.0);
    const Vec3 dph = r * Vec3(-std::sin(ph) * std::cos(th), -std::sin(ph) * std::sin(th), std::cos(ph));
    return Vec3(dth + kappa * dph);
  });
}

Fraction rationalize(double x, long max_den) {
  if (!std::isfinite(x)) throw ContractError("cannot rationalize a non-finite value");
  if (max_den < 1) throw ContractError("denominator cap must be positive");
  long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  long best_h = std::lround(x), best_k = 1;
  double rest = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(rest);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long h = ai * h0 + h1, k = ai * k0 + k1;
    if (k > max_den) break;
    best_h = h;
    best_k = k;
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    const double frac = rest - a;
    if (frac < 1e-12) break;
    rest = 1.0 / frac;
  }
  return {best_h, best_k, std::abs(x - static_cast<double>(best_h) / best_k)};
}

std::string curves_csv(const std::vector<Curve3D>& curves) {
  std::ostringstream os;
  os << "curve,closed,x,y,z\n";
  char buf[160];
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (const Vec3& p : curves[c].points) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%.17g\n", c, curves[c].closed ? 1 : 0, p.x(), p.y(), p.z());
      os << buf;
    }
  return os.str();
}

}  // namespace optiq::ck
