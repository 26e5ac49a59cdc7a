#include "optiq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optiq {

Grid::Grid(int dim, std::array<double, 3> origin, std::array<double, 3> spacing,
           std::array<int, 3> counts, std::array<Boundary, 3> boundary, std::size_t node_cap)
    : dim_(dim), origin_(origin), spacing_(spacing), counts_(counts), boundary_(boundary) {
  if (dim < 1 || dim > 3) throw ContractError("grid dimension must be 1, 2 or 3");
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      origin_[a] = 0.0;
      spacing_[a] = 1.0;
      counts_[a] = 1;
      boundary_[a] = Boundary::clamped;
      continue;
    }
    if (counts_[a] < 3) throw ContractError("grid needs at least 3 samples per axis");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw ContractError("grid spacing must be positive and finite");
    if (!std::isfinite(origin_[a])) throw ContractError("grid origin must be finite");
    total *= static_cast<std::size_t>(counts_[a]);
    if (total > node_cap) {
      std::ostringstream os;
      os << "grid exceeds node cap of " << node_cap << " samples";
      throw ContractError(os.str());
    }
  }
  strides_ = {1, static_cast<std::size_t>(counts_[0]),
              static_cast<std::size_t>(counts_[0]) * static_cast<std::size_t>(counts_[1])};
  size_ = total;
}

Grid Grid::box(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
               std::array<int, 3> counts, std::array<Boundary, 3> boundary, std::size_t node_cap) {
  std::array<double, 3> h{1, 1, 1};
  for (int a = 0; a < std::min(dim, 3); ++a) {
    if (!(hi[a] > lo[a])) throw ContractError("grid box needs hi > lo on every axis");
    if (counts[a] < 3) throw ContractError("grid needs at least 3 samples per axis");
    h[a] = boundary[a] == Boundary::periodic ? (hi[a] - lo[a]) / counts[a]
                                             : (hi[a] - lo[a]) / (counts[a] - 1);
  }
  return Grid(dim, lo, h, counts, boundary, node_cap);
}

Grid Grid::cube(int dim, double lo, double hi, int count, Boundary boundary,
                std::size_t node_cap) {
  return box(dim, {lo, lo, lo}, {hi, hi, hi}, {count, count, count},
             {boundary, boundary, boundary}, node_cap);
}

Index3 Grid::unravel(std::size_t idx) const {
  Index3 n;
  n.i = static_cast<int>(idx % strides_[1]);
  n.j = static_cast<int>((idx / strides_[1]) % static_cast<std::size_t>(counts_[1]));
  n.k = static_cast<int>(idx / strides_[2]);
  return n;
}

Vec3 Grid::position(std::size_t idx) const {
  const Index3 n = unravel(idx);
  return position(n.i, n.j, n.k);
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

double Grid::min_spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

int Grid::boundary_distance(const Index3& n) const {
  const int idx[3] = {n.i, n.j, n.k};
  int d = 1 << 30;
  for (int a = 0; a < dim_; ++a) {
    if (boundary_[a] == Boundary::periodic) continue;
    d = std::min({d, idx[a], counts_[a] - 1 - idx[a]});
  }
  return d;
}

bool Grid::same_lattice(const Grid& o) const {
  if (dim_ != o.dim_) return false;
  for (int a = 0; a < 3; ++a) {
    if (counts_[a] != o.counts_[a] || boundary_[a] != o.boundary_[a]) return false;
    if (origin_[a] != o.origin_[a] || spacing_[a] != o.spacing_[a]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, Complex fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ContractError("scalar field value count does not match grid node count");
}

ScalarField ScalarField::conj() const {
  ScalarField out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

ScalarField ScalarField::real_part() const {
  ScalarField out(*this);
  for (auto& v : out.values_) v = v.real();
  return out;
}

ScalarField ScalarField::imag_part() const {
  ScalarField out(*this);
  for (auto& v : out.values_) v = v.imag();
  return out;
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field addition");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field subtraction");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
  return *this;
}

ScalarField& ScalarField::operator*=(Complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field product");
  for (std::size_t n = 0; n < values_.size(); ++n) values_[n] *= o.values_[n];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, Complex s) { return a *= s; }
ScalarField operator*(Complex s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }

// ---------------------------------------------------------------------------

VectorField3::VectorField3(const Grid& grid)
    : c_{ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

VectorField3::VectorField3(ScalarField x, ScalarField y, ScalarField z)
    : c_{std::move(x), std::move(y), std::move(z)} {
  require_same_grid(c_[0].grid(), c_[1].grid(), "vector field components");
  require_same_grid(c_[0].grid(), c_[2].grid(), "vector field components");
}

VectorField3 VectorField3::conj() const { return {c_[0].conj(), c_[1].conj(), c_[2].conj()}; }

VectorField3 VectorField3::real_part() const {
  return {c_[0].real_part(), c_[1].real_part(), c_[2].real_part()};
}

double VectorField3::max_abs() const {
  double m = 0.0;
  for (std::size_t n = 0; n < size(); ++n) {
    const double s = std::norm(c_[0][n]) + std::norm(c_[1][n]) + std::norm(c_[2][n]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

VectorField3& VectorField3::operator+=(const VectorField3& o) {
  for (int a = 0; a < 3; ++a) c_[a] += o.c_[a];
  return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& o) {
  for (int a = 0; a < 3; ++a) c_[a] -= o.c_[a];
  return *this;
}

VectorField3& VectorField3::operator*=(Complex s) {
  for (auto& c : c_) c *= s;
  return *this;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(VectorField3 a, Complex s) { return a *= s; }
VectorField3 operator*(Complex s, VectorField3 a) { return a *= s; }
VectorField3 operator*(const ScalarField& s, VectorField3 v) {
  for (int a = 0; a < 3; ++a) v[a] *= s;
  return v;
}

// ---------------------------------------------------------------------------

void require_finite(const ScalarField& f, const char* what) {
  const auto values = f.values();
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (std::isfinite(values[n].real()) && std::isfinite(values[n].imag())) continue;
    const Index3 at = f.grid().unravel(n);
    std::ostringstream os;
    os << what << ": non-finite value at node " << n << " (" << at.i << "," << at.j << ","
       << at.k << ")";
    throw ContractError(os.str());
  }
}

void require_finite(const VectorField3& v, const char* what) {
  for (int a = 0; a < 3; ++a) require_finite(v[a], what);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_lattice(b)) throw ContractError(std::string(what) + ": fields live on different grids");
}

namespace {

// Applies `stencil(line, n, i)` to every line of samples along `axis`, where
// line(m) reads the m-th sample (already wrapped for periodic axes).
template <class Stencil>
ScalarField apply_along(const ScalarField& f, int axis, Stencil&& stencil) {
  const Grid& g = f.grid();
  ScalarField out(g);
  if (axis >= g.dim()) return out;
  const int n = g.count(axis);
  const std::size_t stride = g.stride(axis);
  const bool periodic = g.boundary(axis) == Boundary::periodic;
  const auto in = f.values();
  auto dst = out.values();
  for (std::size_t base = 0; base < g.size(); ++base) {
    if ((base / stride) % static_cast<std::size_t>(n) != 0) continue;
    auto line = [&](int m) {
      if (periodic) m = ((m % n) + n) % n;
      return in[base + stride * static_cast<std::size_t>(m)];
    };
    for (int i = 0; i < n; ++i) dst[base + stride * static_cast<std::size_t>(i)] = stencil(line, n, i, periodic);
  }
  return out;
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) {
  require_finite(f, "partial derivative");
  if (axis >= f.grid().dim()) return ScalarField(f.grid());
  const double h = f.grid().spacing(axis);
  return apply_along(f, axis, [h](auto&& line, int n, int i, bool periodic) -> Complex {
    if (periodic || (i > 0 && i < n - 1)) return (line(i + 1) - line(i - 1)) / (2.0 * h);
    if (i == 0) return (-3.0 * line(0) + 4.0 * line(1) - line(2)) / (2.0 * h);
    return (3.0 * line(n - 1) - 4.0 * line(n - 2) + line(n - 3)) / (2.0 * h);
  });
}

ScalarField second_partial(const ScalarField& f, int axis) {
  require_finite(f, "second derivative");
  if (axis >= f.grid().dim()) return ScalarField(f.grid());
  const double h2 = f.grid().spacing(axis) * f.grid().spacing(axis);
  return apply_along(f, axis, [h2](auto&& line, int n, int i, bool periodic) -> Complex {
    if (periodic || (i > 0 && i < n - 1)) return (line(i + 1) - 2.0 * line(i) + line(i - 1)) / h2;
    if (n < 4) {
      const int c = i == 0 ? 1 : n - 2;
      return (line(c + 1) - 2.0 * line(c) + line(c - 1)) / h2;
    }
    if (i == 0) return (2.0 * line(0) - 5.0 * line(1) + 4.0 * line(2) - line(3)) / h2;
    return (2.0 * line(n - 1) - 5.0 * line(n - 2) + 4.0 * line(n - 3) - line(n - 4)) / h2;
  });
}

ScalarField partial4(const ScalarField& f, int axis) {
  require_finite(f, "partial derivative");
  const Grid& g = f.grid();
  if (axis >= g.dim()) return ScalarField(g);
  if (g.boundary(axis) != Boundary::periodic)
    throw ContractError("fourth-order derivative requires a periodic axis");
  if (g.count(axis) < 5) throw ContractError("fourth-order derivative needs 5 samples per axis");
  const double h = g.spacing(axis);
  return apply_along(f, axis, [h](auto&& line, int, int i, bool) -> Complex {
    return (8.0 * (line(i + 1) - line(i - 1)) - (line(i + 2) - line(i - 2))) / (12.0 * h);
  });
}

VectorField3 gradient(const ScalarField& f) {
  return {partial(f, 0), partial(f, 1), partial(f, 2)};
}

ScalarField divergence(const VectorField3& v) {
  ScalarField out = partial(v[0], 0);
  out += partial(v[1], 1);
  out += partial(v[2], 2);
  return out;
}

VectorField3 curl(const VectorField3& v) {
  return {partial(v[2], 1) - partial(v[1], 2), partial(v[0], 2) - partial(v[2], 0),
          partial(v[1], 0) - partial(v[0], 1)};
}

VectorField3 curl4(const VectorField3& v) {
  return {partial4(v[2], 1) - partial4(v[1], 2), partial4(v[0], 2) - partial4(v[2], 0),
          partial4(v[1], 0) - partial4(v[0], 1)};
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out = second_partial(f, 0);
  for (int a = 1; a < f.grid().dim(); ++a) out += second_partial(f, a);
  return out;
}

Complex integrate(const ScalarField& f) {
  require_finite(f, "integrate");
  const Grid& g = f.grid();
  const auto values = f.values();
  Complex sum = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) {
    const Index3 at = g.unravel(n);
    const int idx[3] = {at.i, at.j, at.k};
    double w = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      if (g.boundary(a) == Boundary::clamped && (idx[a] == 0 || idx[a] == g.count(a) - 1)) w *= 0.5;
    }
    sum += w * values[n];
  }
  return sum * g.cell_volume();
}

ScalarField dot(const VectorField3& u, const VectorField3& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

ScalarField hdot(const VectorField3& u, const VectorField3& v) {
  return u[0].conj() * v[0] + u[1].conj() * v[1] + u[2].conj() * v[2];
}

VectorField3 cross(const VectorField3& u, const VectorField3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

Complex interpolate(const ScalarField& f, const Vec3& x) {
  const Grid& g = f.grid();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  std::array<double, 3> t{0, 0, 0};
  for (int a = 0; a < g.dim(); ++a) {
    const int n = g.count(a);
    const double u = (x[a] - g.origin(a)) / g.spacing(a);
    if (g.boundary(a) == Boundary::periodic) {
      const double cell = std::floor(u);
      t[a] = u - cell;
      lo[a] = static_cast<int>(((static_cast<long long>(cell) % n) + n) % n);
      hi[a] = (lo[a] + 1) % n;
    } else {
      lo[a] = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
      hi[a] = lo[a] + 1;
      t[a] = u - lo[a];
    }
  }
  Complex out = 0.0;
  for (int c = 0; c < 8; ++c) {
    double w = 1.0;
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      const bool up = (c >> a) & 1;
      if (up && a >= g.dim()) {
        w = 0.0;
        break;
      }
      idx[a] = up ? hi[a] : lo[a];
      w *= up ? t[a] : 1.0 - t[a];
    }
    if (w != 0.0) out += w * f.at(idx[0], idx[1], idx[2]);
  }
  return out;
}

bool grid_contains(const Grid& g, const Vec3& x) {
  for (int a = 0; a < g.dim(); ++a) {
    if (g.boundary(a) == Boundary::periodic) continue;
    const double hi = g.coord(a, g.count(a) - 1);
    if (x[a] < g.origin(a) || x[a] > hi) return false;
  }
  return true;
}

double max_abs_interior(const ScalarField& f, int margin) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.boundary_distance(g.unravel(n)) < margin) continue;
    m = std::max(m, std::abs(f[n]));
  }
  return m;
}

double max_abs_interior(const VectorField3& v, int margin) {
  const Grid& g = v.grid();
  double m = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.boundary_distance(g.unravel(n)) < margin) continue;
    const double s = std::norm(v[0][n]) + std::norm(v[1][n]) + std::norm(v[2][n]);
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

}  // namespace optiq
