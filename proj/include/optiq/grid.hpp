#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "optiq/error.hpp"

namespace optiq {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

enum class Boundary { periodic, clamped };

struct Index3 {
  int i = 0, j = 0, k = 0;
};

/// Uniform Cartesian lattice in one, two or three dimensions.
///
/// Axes beyond `dim()` are inactive: they carry a single sample at coordinate
/// zero. Clamped axes sample both ends of their interval, periodic axes sample
/// `[lo, lo + period)`.
class Grid {
 public:
  static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 26;

  Grid() = default;
  Grid(int dim, std::array<double, 3> origin, std::array<double, 3> spacing,
       std::array<int, 3> counts, std::array<Boundary, 3> boundary,
       std::size_t node_cap = kDefaultNodeCap);

  /// Grid covering `[lo, hi]` per active axis with `counts` samples.
  static Grid box(int dim, std::array<double, 3> lo, std::array<double, 3> hi,
                  std::array<int, 3> counts, std::array<Boundary, 3> boundary,
                  std::size_t node_cap = kDefaultNodeCap);

  /// Same interval, count and boundary on every active axis.
  static Grid cube(int dim, double lo, double hi, int count, Boundary boundary,
                   std::size_t node_cap = kDefaultNodeCap);

  int dim() const noexcept { return dim_; }
  double origin(int axis) const { return origin_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  int count(int axis) const { return counts_[axis]; }
  Boundary boundary(int axis) const { return boundary_[axis]; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + strides_[1] * static_cast<std::size_t>(j) +
           strides_[2] * static_cast<std::size_t>(k);
  }
  Index3 unravel(std::size_t idx) const;

  double coord(int axis, int i) const { return origin_[axis] + i * spacing_[axis]; }
  Vec3 position(int i, int j, int k) const {
    return {coord(0, i), coord(1, j), coord(2, k)};
  }
  Vec3 position(std::size_t idx) const;

  /// Volume (length, area) element of one sample.
  double cell_volume() const;
  double min_spacing() const;

  /// Number of nodes separating (i,j,k) from the nearest clamped face along
  /// active axes; periodic axes never limit it.
  int boundary_distance(const Index3& n) const;

  bool same_lattice(const Grid& other) const;

 private:
  int dim_ = 1;
  std::array<double, 3> origin_{0, 0, 0};
  std::array<double, 3> spacing_{1, 1, 1};
  std::array<int, 3> counts_{1, 1, 1};
  std::array<Boundary, 3> boundary_{Boundary::clamped, Boundary::clamped, Boundary::clamped};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::size_t size_ = 1;
};

/// Complex scalar samples on a grid (real fields carry zero imaginary parts).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid grid, Complex fill = {});
  ScalarField(Grid grid, std::vector<Complex> values);

  template <class Fn>
  static ScalarField sample(const Grid& grid, Fn&& fn) {
    ScalarField f(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) f.values_[n] = Complex(fn(grid.position(n)));
    return f;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  Complex& operator[](std::size_t n) { return values_[n]; }
  const Complex& operator[](std::size_t n) const { return values_[n]; }
  Complex& at(int i, int j = 0, int k = 0) { return values_[grid_.index(i, j, k)]; }
  const Complex& at(int i, int j = 0, int k = 0) const { return values_[grid_.index(i, j, k)]; }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }

  ScalarField conj() const;
  ScalarField real_part() const;
  ScalarField imag_part() const;
  double max_abs() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(Complex s);
  /// Pointwise product.
  ScalarField& operator*=(const ScalarField& o);

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, Complex s);
ScalarField operator*(Complex s, ScalarField a);
ScalarField operator*(ScalarField a, const ScalarField& b);

/// Three complex components sharing one grid.
class VectorField3 {
 public:
  VectorField3() = default;
  explicit VectorField3(const Grid& grid);
  VectorField3(ScalarField x, ScalarField y, ScalarField z);

  template <class Fn>
  static VectorField3 sample(const Grid& grid, Fn&& fn) {
    VectorField3 v(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const auto value = fn(grid.position(n));
      for (int a = 0; a < 3; ++a) v.c_[a][n] = Complex(value[a]);
    }
    return v;
  }

  const Grid& grid() const noexcept { return c_[0].grid(); }
  std::size_t size() const noexcept { return c_[0].size(); }
  ScalarField& operator[](int a) { return c_[a]; }
  const ScalarField& operator[](int a) const { return c_[a]; }

  VectorField3 conj() const;
  VectorField3 real_part() const;
  double max_abs() const;

  VectorField3& operator+=(const VectorField3& o);
  VectorField3& operator-=(const VectorField3& o);
  VectorField3& operator*=(Complex s);

 private:
  std::array<ScalarField, 3> c_;
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(VectorField3 a, Complex s);
VectorField3 operator*(Complex s, VectorField3 a);
/// Scales each component pointwise by a scalar field.
VectorField3 operator*(const ScalarField& s, VectorField3 v);

/// Throws ContractError naming the first non-finite node.
void require_finite(const ScalarField& f, const char* what);
void require_finite(const VectorField3& v, const char* what);
void require_same_grid(const Grid& a, const Grid& b, const char* what);

// Second-order finite-difference operators. Interior nodes use central
// differences, clamped faces one-sided second-order stencils, periodic axes
// wrap around. Derivatives along inactive axes are zero.
ScalarField partial(const ScalarField& f, int axis);
ScalarField second_partial(const ScalarField& f, int axis);
VectorField3 gradient(const ScalarField& f);
ScalarField divergence(const VectorField3& v);
VectorField3 curl(const VectorField3& v);
ScalarField laplacian(const ScalarField& f);

/// Fourth-order central first derivative; periodic axes only.
ScalarField partial4(const ScalarField& f, int axis);
VectorField3 curl4(const VectorField3& v);

/// Trapezoidal quadrature on clamped axes, rectangle rule on periodic axes.
Complex integrate(const ScalarField& f);

/// Pointwise u . v without conjugation.
ScalarField dot(const VectorField3& u, const VectorField3& v);
/// Pointwise conj(u) . v.
ScalarField hdot(const VectorField3& u, const VectorField3& v);
/// Pointwise u x v without conjugation.
VectorField3 cross(const VectorField3& u, const VectorField3& v);

/// Multilinear interpolation at x. Periodic axes wrap; clamped axes extrapolate
/// linearly from the edge cell.
Complex interpolate(const ScalarField& f, const Vec3& x);

/// True when x lies inside the sampled box (periodic axes always contain x).
bool grid_contains(const Grid& g, const Vec3& x);

/// Max |f| over nodes at least `margin` samples away from clamped faces.
double max_abs_interior(const ScalarField& f, int margin = 1);
double max_abs_interior(const VectorField3& v, int margin = 1);

}  // namespace optiq
