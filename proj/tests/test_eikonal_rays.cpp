#include <cmath>
#include <numbers>

#include "doctest.h"
#include "optiq/eikonal_rays.hpp"

using namespace optiq;
using namespace optiq::rays;
using std::numbers::pi;

namespace {

Grid unit_cube(int n) { return Grid::cube(3, 0.0, 1.0, n, Boundary::clamped); }

EikonalSolution solution(const Grid& g, auto&& phi, auto&& amp, double k = 1.0) {
  return {ScalarField::sample(g, phi), ScalarField::sample(g, amp), k, k, false};
}

}  // namespace

TEST_CASE("eikonal residual") {
  const Grid g = unit_cube(17);
  const auto plane = solution(g, [](const Vec3& x) { return x.z(); }, [](const Vec3&) { return 1.0; });
  CHECK(eikonal_residual(plane, MediumIndex::constant(1.0)) < 1e-12);
  CHECK(eikonal_residual(plane, MediumIndex::constant(2.0)) == doctest::Approx(3.0));

  // Source outside the box: smooth spherical eikonal, second-order convergence.
  const Vec3 far(-0.5, 0.5, 0.5);
  auto err = [&](int n) {
    const auto s = solution(unit_cube(n), [&](const Vec3& x) { return (x - far).norm(); },
                            [](const Vec3&) { return 1.0; });
    return eikonal_residual(s, MediumIndex::constant(1.0));
  };
  CHECK(err(17) / err(33) == doctest::Approx(4.0).epsilon(0.15));

  // Source inside the box: the 3h ball is masked, the residual stays bounded.
  const Vec3 src(0.5, 0.5, 0.5);
  const auto inside = solution(unit_cube(33), [&](const Vec3& x) { return (x - src).norm(); },
                               [](const Vec3&) { return 1.0; });
  const double masked = eikonal_residual(inside, MediumIndex::constant(1.0), src);
  CHECK(masked < 0.1);
  CHECK(eikonal_residual(inside, MediumIndex::constant(1.0)) > masked);
}

TEST_CASE("straight rays in a uniform medium") {
  const auto path = trace_ray(Vec3::Zero(), Vec3::UnitZ(), MediumIndex::constant(1.0), 0.0, 5.0, 0.01);
  REQUIRE(path.samples.size() == 501);
  CHECK_FALSE(path.exited);
  for (const auto& s : path.samples) {
    CHECK((s.x - s.tau * Vec3::UnitZ()).norm() < 1e-12);
    CHECK(s.lap_phi == 0.0);
  }
  CHECK(path.samples.back().phi == doctest::Approx(5.0));
}

TEST_CASE("rays follow the parabola of a linear index profile") {
  const double a = 0.5;
  const auto medium = MediumIndex::linear(a);
  const Vec3 p0 = Vec3(1, 0, 1).normalized();
  const auto path = trace_ray(Vec3::Zero(), p0, medium, 0.0, 10.0, 1e-3);
  double worst = 0, speed = 0;
  for (const auto& s : path.samples) {
    const Vec3 exact = p0 * s.tau + Vec3(0, 0, 0.25 * a * s.tau * s.tau);
    worst = std::max(worst, (s.x - exact).norm());
    speed = std::max(speed, std::abs(s.dx.squaredNorm() - medium.n2(s.x)) / medium.n2(s.x));
  }
  CHECK(worst < 1e-10);
  CHECK(speed < 1e-8);

  // The same profile sampled on a grid.
  const Grid g = Grid::box(3, {-1, -1, -1}, {12, 1, 40}, {14, 3, 42},
                           {Boundary::clamped, Boundary::clamped, Boundary::clamped});
  const auto sampled = MediumIndex::sampled(ScalarField::sample(g, [&](const Vec3& x) { return std::sqrt(1 + a * x.z()); }));
  const auto sp = trace_ray(Vec3::Zero(), p0, sampled, 0.0, 10.0, 1e-2);
  CHECK((sp.samples.back().x - path.samples.back().x).norm() < 1e-8);
}

TEST_CASE("rays leaving the domain are truncated") {
  auto medium = MediumIndex::constant(1.0);
  medium.with_domain(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  const auto path = trace_ray(Vec3::Zero(), Vec3::UnitX(), medium, 0.0, 5.0, 0.01);
  CHECK(path.exited);
  CHECK(path.samples.back().x.x() <= 1.0);
  CHECK(path.samples.back().x.x() > 0.98);
  CHECK_THROWS_AS(trace_ray(Vec3(2, 0, 0), Vec3::UnitX(), medium, 0.0, 1.0, 0.1), ContractError);
}

TEST_CASE("bundle Jacobian") {
  const auto vacuum = MediumIndex::constant(1.0);
  const auto plane = ray_jacobian(plane_bundle(Vec3::Zero(), Vec3(0, 1, 1)), vacuum, 0.0, 10.0, 0.01, 1e-4);
  for (const auto& s : plane.samples) CHECK(std::abs(s.J - 1.0) < 1e-8);

  // Point source at the origin launched at unit distance, so tau is the radius.
  const auto sphere = ray_jacobian(point_source_bundle(Vec3::Zero(), Vec3(0.6, 0.0, 0.8)), vacuum, 1.0, 10.0, 0.01, 1e-4);
  CHECK(sphere.samples.front().J == doctest::Approx(1.0).epsilon(1e-8));
  double worst = 0, liouville = 0, lap = 0;
  for (const auto& s : sphere.samples) {
    worst = std::max(worst, std::abs(s.J / (s.tau * s.tau) - 1.0));
    liouville = std::max(liouville, std::abs(std::exp(s.lap_integral) / s.J - 1.0));
    lap = std::max(lap, std::abs(s.lap_phi - 2.0 / s.tau));
    CHECK_FALSE(s.caustic);
  }
  CHECK(worst < 0.01);
  CHECK(liouville < 0.01);
  CHECK(lap < 1e-8);

  // (1/J) dJ/dtau matches lap Phi along the ray.
  const auto& smp = sphere.samples;
  double gap = 0;
  const double h = smp[1].tau - smp[0].tau;
  for (std::size_t i = 1; i + 1 < smp.size(); ++i)
    gap = std::max(gap, std::abs((smp[i + 1].J - smp[i - 1].J) / (2 * h * smp[i].J) - smp[i].lap_phi));
  CHECK(gap < 1e-4);
}

TEST_CASE("converging rays flag a caustic") {
  const RayBundle focus{Vec3::Zero(), [](const Vec3& x) { return Vec3(-x.x(), 0, 1); }};
  const auto path = ray_jacobian(focus, MediumIndex::constant(1.0), 0.0, 2.0, 0.01, 1e-4);
  bool before = false, after = false;
  for (const auto& s : path.samples) {
    if (s.tau < 0.9) before |= s.caustic;
    if (s.tau > 1.1) after |= s.caustic;
  }
  CHECK_FALSE(before);
  CHECK(after);
  const auto t = transport_amplitude(path, 1.0);
  CHECK(std::isnan(t.via_jacobian.back()));
}

TEST_CASE("transport amplitude") {
  const auto vacuum = MediumIndex::constant(1.0);
  const auto plane = transport_amplitude(ray_jacobian(plane_bundle(Vec3::Zero(), Vec3::UnitZ()), vacuum, 0, 5, 0.01, 1e-4), 2.5);
  for (std::size_t i = 0; i < plane.via_laplacian.size(); ++i) {
    CHECK(plane.via_laplacian[i] == 2.5);
    CHECK(plane.via_jacobian[i] == doctest::Approx(2.5).epsilon(1e-8));
  }

  const auto path = ray_jacobian(point_source_bundle(Vec3::Zero(), Vec3::UnitX()), vacuum, 1.0, 10.0, 0.01, 1e-4);
  const auto sph = transport_amplitude(path, 1.0);
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    CHECK(sph.via_jacobian[i] * path.samples[i].tau == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sph.via_laplacian[i] * path.samples[i].tau == doctest::Approx(1.0).epsilon(0.01));
  }
  CHECK(sph.max_relative_gap < 0.01);
  CHECK(with_amplitude(path, 3.0).samples.back().amplitude == doctest::Approx(0.3).epsilon(0.01));

  // Linear profile, oblique plane bundle: both routes agree.
  const auto lin = ray_jacobian(plane_bundle(Vec3::Zero(), Vec3(1, 0, 1)), MediumIndex::linear(0.5), 0.0, 10.0, 1e-3, 1e-4);
  const auto amp = transport_amplitude(lin, 1.0);
  CHECK(amp.max_relative_gap < 0.01);
  CHECK(lin.samples.back().J > 1.5);
}

TEST_CASE("amplitude normalization") {
  const Grid g = unit_cube(5);
  const auto one = normalize_amplitude(ScalarField(g, 2.0));
  CHECK(one.max_abs() == doctest::Approx(1.0).epsilon(1e-14));
  const auto v = ScalarField::sample(g, [](const Vec3& x) { return 1 + x.x() * x.y(); });
  const auto n1 = normalize_amplitude(v);
  CHECK((normalize_amplitude(n1) - n1).max_abs() < 1e-14);
  CHECK_THROWS_WITH_AS(normalize_amplitude(ScalarField(g)), "null amplitude norm", ContractError);
}

TEST_CASE("geometric density and current") {
  const Grid g = unit_cube(9);
  const auto plane = solution(g, [](const Vec3& x) { return x.z(); }, [](const Vec3&) { return 1.0; });
  const auto dc = geometric_density_current(plane);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(dc.rho[n].real() == doctest::Approx(1.0));
    CHECK(dc.current[2][n].real() == doctest::Approx(0.5));
    CHECK(std::abs(dc.current[0][n]) + std::abs(dc.current[1][n]) < 1e-14);
  }

  auto amp = [](const Vec3& x) { return 1 + 0.3 * std::sin(2 * pi * x.x()); };
  const auto base = solution(g, [](const Vec3& x) { return x.z(); }, amp);
  EikonalSolution scaled = base;
  scaled.amplitude *= 7.0;
  CHECK((geometric_density_current(scaled).rho - geometric_density_current(base).rho).max_abs() < 1e-13);

  // Spherical transport solution v = 1/r, Phi = r: the current is divergence free.
  const Vec3 far(-0.5, 0.5, 0.5);
  auto div_err = [&](int n) {
    const auto s = solution(unit_cube(n), [&](const Vec3& x) { return (x - far).norm(); },
                            [&](const Vec3& x) { return 1.0 / (x - far).norm(); });
    return max_abs_interior(divergence(geometric_density_current(s).current), 1);
  };
  CHECK(div_err(17) / div_err(33) == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("geometric energy density tends to k^2 v^2") {
  const Grid g = Grid::cube(3, 0.0, 1.0, 9, Boundary::clamped);
  const double k = 100.0;
  const auto sol = solution(g, [](const Vec3& x) { return x.z(); },
                            [](const Vec3& x) { return 1 + 0.2 * std::sin(2 * pi * x.z()); }, k);
  const auto eps = geometric_energy_density(sol, MediumIndex::constant(1.0));
  double worst = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double v = sol.amplitude[n].real();
    worst = std::max(worst, std::abs(eps[n].real() / (k * k * v * v) - 1.0));
  }
  CHECK(worst < 1e-3);
  CHECK(worst > 0.0);
}
