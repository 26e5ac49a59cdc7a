// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "optiq/chladni_modes.hpp"
#include "optiq/ck_knots.hpp"
#include "optiq/eikonal_rays.hpp"
#include "optiq/huygens_equiv.hpp"
#include "optiq/maxwell_rs.hpp"
#include "optiq/scalar_field.hpp"
#include "optiq/schrodinger_var.hpp"

using namespace optiq;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);
int failures = 0;

struct Result {
  bool pass = true;
  std::string detail;
};

void add(Result& r, bool ok, const char* fmt, double value) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, value);
  if (!r.detail.empty()) r.detail += ", ";
  r.detail += buf;
  if (!ok) {
    r.detail += " (x)";
    r.pass = false;
  }
}

void criterion(int id, const char* name, double budget, const std::function<Result()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  add(r, secs < budget, "runtime %.1fs", secs);
  std::printf("%s %2d %s: %s [budget %.0fs]\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), budget);
  std::fflush(stdout);
  failures += r.pass ? 0 : 1;
}

double series_j1(double x) {
  double term = x / 2.0, sum = term;
  for (int k = 1; k < 40; ++k) {
    term *= -(x * x / 4.0) / (k * (k + 1.0));
    sum += term;
  }
  return sum;
}

double bessel_j0(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0) / (k * k);
    sum += term;
  }
  return sum;
}

double first_j0_zero() {
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_j0(lo) * bessel_j0(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Grid periodic_box(int nxy, int nz) {
  return Grid::box(3, {0, 0, 0}, {1, 1, 1}, {nxy, nxy, nz},
                   {Boundary::periodic, Boundary::periodic, Boundary::periodic});
}

Grid ck_box(double hx, double hz, int n) {
  const int nz = static_cast<int>(std::lround(hz / hx * (n - 1))) + 1;
  return Grid::box(3, {-hx, -hx, -hz}, {hx, hx, hz}, {n, n, nz},
                   {Boundary::clamped, Boundary::clamped, Boundary::clamped});
}

ck::Curve3D circle(const Vec3& c, const Vec3& e1, const Vec3& e2, int n) {
  ck::Curve3D out;
  out.closed = true;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * pi * i / n;
    out.points.push_back(c + std::cos(t) * e1 + std::sin(t) * e2);
  }
  return out;
}

Result photon_evolution() {
  using namespace photon;
  Result r;
  const Grid g = periodic_box(64, 64);
  const double dt = 0.25 * g.min_spacing();
  const auto f0 = circular_plane_wave(g, 2 * pi, 1);
  const auto f1 = evolve(f0, dt, 100, {CurlStencil::fourth_order});
  const double e0 = total_energy(f0);
  const auto exact = circular_plane_wave(g, 2 * pi, 1, 100 * dt);
  const double phase = std::abs(std::arg(integrate(hdot(exact.F, f1.F))));
  add(r, std::abs(total_energy(f1) - e0) / e0 < 1e-8, "energy drift %.2e", std::abs(total_energy(f1) - e0) / e0);
  add(r, divergence(f1.F).max_abs() < 1e-8, "max|div F| %.2e", divergence(f1.F).max_abs());
  add(r, phase < 1e-3, "phase error %.2e (4th-order curl)", phase);
  return r;
}

Result continuity_audits() {
  Result r;
  auto photon_res = [](int n) {
    const Grid g = periodic_box(4, n);
    const double k = 2 * pi;
    const auto E = VectorField3::sample(g, [&](const Vec3& x) { return Vec3(std::cos(k * x.z()), 0, 0); });
    const auto H = VectorField3::sample(g, [&](const Vec3& x) { return Vec3(0, std::cos(k * x.z()), 0); });
    const double dt = 0.25 * g.min_spacing();
    const auto states = photon::evolve_series(photon::rs_build(E, H, 1), dt, n / 4);
    return photon::continuity_residual(states, dt);
  };
  auto scalar_res = [](int n) {
    const Grid g = Grid::cube(1, 0.0, 1.0, n, Boundary::periodic);
    const double dt = 0.25 / n;
    std::vector<scalar::ScalarState> s;
    for (int i = 0; i < 8; ++i) {
      const double t = i * dt;
      auto v = [&](const Vec3& x) {
        return std::exp(Complex(0, 2 * pi * (x.x() - t))) + 0.3 * std::exp(Complex(0, 4 * pi * (x.x() - t)));
      };
      auto vt = [&](const Vec3& x) {
        return Complex(0, -2 * pi) * std::exp(Complex(0, 2 * pi * (x.x() - t))) +
               0.3 * Complex(0, -4 * pi) * std::exp(Complex(0, 4 * pi * (x.x() - t)));
      };
      s.push_back({ScalarField::sample(g, v), ScalarField::sample(g, vt)});
    }
    return scalar::continuity_residual_scalar(s, dt);
  };
  const double p = std::log2(photon_res(32) / photon_res(64));
  const double s = std::log2(scalar_res(64) / scalar_res(128));
  add(r, std::abs(std::exp2(p) - 4.0) <= 0.8, "photon order %.3f", p);
  add(r, std::abs(std::exp2(s) - 4.0) <= 0.8, "scalar order %.3f", s);
  return r;
}

Result stationary_identities() {
  Result r;
  const Grid g = Grid::cube(2, 0, 1, 65, Boundary::clamped);
  const double w = 3.0, c = 2.0, m = 1.5, hbar = 0.7;
  const auto psi = ScalarField::sample(g, [](const Vec3& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); });
  const scalar::ScalarState s{psi, psi * Complex(0, -w), c, m, hbar};
  const auto se = scalar::stress_energy(s);
  add(r, se.T0i.max_abs() <= 1e-14 * se.T00.max_abs(), "max|T0i| %.1e", se.T0i.max_abs());
  const auto J = scalar::kg_current(s, true);
  double gap = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) gap = std::max(gap, std::abs(J.J0[n] - hbar * w / m * psi[n] * psi[n]));
  add(r, gap < 1e-12, "max|J0 - (hbar w/m) psi^2| %.1e", gap);
  return r;
}

Result eikonal_transport() {
  using namespace rays;
  Result r;
  const auto vacuum = MediumIndex::constant(1.0);
  const auto path = ray_jacobian(point_source_bundle(Vec3::Zero(), Vec3(0.6, 0.0, 0.8)), vacuum, 1.0, 10.0, 0.01, 1e-4);
  const auto amp = transport_amplitude(path, 1.0);
  double jdev = 0.0, vdev = 0.0;
  for (std::size_t i = 0; i < path.samples.size(); ++i) {
    const double tau = path.samples[i].tau;
    jdev = std::max(jdev, std::abs(path.samples[i].J / (tau * tau) - 1.0));
    vdev = std::max(vdev, std::abs(amp.via_jacobian[i] * tau - 1.0));
    vdev = std::max(vdev, std::abs(amp.via_laplacian[i] * tau - 1.0));
  }
  add(r, jdev < 0.01, "max|J/tau^2 - 1| %.1e", jdev);
  add(r, vdev < 0.01, "max|v tau - 1| %.1e", vdev);
  const auto lin = ray_jacobian(plane_bundle(Vec3::Zero(), Vec3(1, 0, 1)), MediumIndex::linear(0.5), 0.0, 10.0, 1e-3, 1e-4);
  const double gap = transport_amplitude(lin, 1.0).max_relative_gap;
  add(r, gap < 0.01, "linear-medium amplitude route gap %.1e", gap);
  return r;
}

bool same(const huygens::WaveOperator& a, const huygens::WaveOperator& b) {
  bool ok = std::abs(a.a2t - b.a2t) < 1e-14 && std::abs(a.a1t - b.a1t) < 1e-14 && std::abs(a.alap - b.alap) < 1e-14 &&
            std::abs(a.a0 - b.a0) < 1e-14;
  for (int i = 0; i < 3; ++i) ok = ok && std::abs(a.a1x[i] - b.a1x[i]) < 1e-14;
  return ok;
}

Result huygens_chain() {
  using namespace huygens;
  Result r;
  // Expected operator rows, with a = 1, b = c = 1/sqrt(2), m = 2.
  const double a = 1.0, b = 1 / std::sqrt(2.0), c = b, m = 2.0;
  const WaveOperator expected_temporal{1.0, 2 * a, -1.0, {0.0, 0.0, 0.0}, a * a};
  const WaveOperator expected_spatial{1.0, 2 * a, -1.0, {2.0 * I * b - 2.0 * I * c, 0.0, 0.0}, a * a - b * b - c * c};
  const WaveOperator expected_telegrapher{1.0, 2 * a, -1.0, {0.0, 0.0, 0.0}, 0.0};
  const WaveOperator expected_kg{1.0, 0.0, -1.0, {0.0, 0.0, 0.0}, m * m};
  const auto chain = build_telegrapher(a);
  const auto kg = telegrapher_to_kg(m);
  int rows = 0;
  rows += same(chain.temporal, expected_temporal);
  rows += same(chain.second_spatial, expected_spatial);
  rows += same(chain.second_spatial, expected_telegrapher);
  rows += same(kg.klein_gordon, expected_kg);
  add(r, rows == 4, "expected operator rows matched %.0f/4", rows);
  add(r, std::abs(chain.constant_gap) == 0.0, "telegrapher constant gap %.3g", std::abs(chain.constant_gap));

  const auto fns = random_test_functions(5, 17);
  const auto lam = GaugeFactor::temporal(0.8);
  const auto Lt = conjugate_operator(dalembert(), lam);
  auto res = [&](int n) {
    const Grid g = Grid::box(2, {0, 0, 0}, {1, 1, 0}, {n, n, 1},
                             {Boundary::periodic, Boundary::periodic, Boundary::periodic});
    return equivalence_residual(dalembert(), Lt, lam, fns, g, 0.0, 1.0 / n, 5);
  };
  const double order = std::log2(res(64) / res(128));
  add(r, std::abs(std::exp2(order) - 4.0) <= 0.8, "residual order %.3f", order);
  return r;
}

Result chladni_spectrum() {
  using namespace chladni;
  Result r;
  MembraneProblem sq;
  sq.h = 1.0 / 128;
  const auto modes = solve_modes(assemble(sq), 4);
  const double expect[4] = {2, 5, 5, 8};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(modes[i].lambda / (expect[i] * pi * pi) - 1.0));
  add(r, worst < 5e-3, "square max rel error %.2e", worst);
  const bool pair = modes[1].cluster_id == modes[2].cluster_id && modes[1].multiplicity == 2 &&
                    modes[0].multiplicity == 1 && modes[3].multiplicity == 1;
  add(r, pair, "5pi^2 multiplicity %.0f", modes[1].multiplicity);
  MembraneProblem disk;
  disk.shape = Shape::disk;
  disk.h = 1.0 / 128;
  const auto d = solve_modes(assemble(disk), 1);
  const double j01 = first_j0_zero();
  const double derr = std::abs(d[0].lambda / (j01 * j01) - 1.0);
  add(r, derr < 0.01, "disk rel error %.2e", derr);
  return r;
}

Result degenerate_nodal() {
  using namespace chladni;
  Result r;
  MembraneProblem sq;
  sq.h = 1.0 / 64;
  const auto op = assemble(sq);
  const auto modes = solve_modes(op, 3);
  const auto pair = cluster_members(modes, modes[1].cluster_id);
  const auto target = ScalarField::sample(op.grid, [](const Vec3& x) {
    return std::sin(2 * pi * x.x()) * std::sin(pi * x.y()) + std::sin(pi * x.x()) * std::sin(2 * pi * x.y());
  });
  const auto set = nodal_set(superpose(pair, project_coefficients(pair, target)), op.active_mask());
  add(r, set.polylines.size() == 1, "polylines %.0f", static_cast<double>(set.polylines.size()));
  double dev = 0.0;
  for (const auto& pl : set.polylines)
    for (const auto& q : pl.points) dev = std::max(dev, std::abs(q.x() + q.y() - 1.0) / std::sqrt(2.0));
  add(r, dev < 2 * sq.h, "max distance to y = 1 - x %.2e", dev);
  return r;
}

Result ck_field() {
  using namespace ck;
  Result r;
  auto res = [](int n) {
    const auto f = ck_build_cylinder(ck_box(1.0, 1.0, n), 3.0, 1, 0.0);
    return std::array<double, 2>{force_free_residual(f), divergence_residual(f)};
  };
  const auto a = res(17), b = res(33);
  add(r, std::abs(a[0] / b[0] - 4.0) <= 0.8, "force-free ratio %.3f", a[0] / b[0]);
  add(r, std::abs(a[1] / b[1] - 4.0) <= 0.8, "divergence ratio %.3f", a[1] / b[1]);

  const double k = 2.0;
  const Grid g = ck_box(1.0, 0.25, 41);
  const auto f = ck_build_cylinder(g, k, 1, 0.0);
  const auto u = radial_scalar(f);
  double worst = 0.0;
  const int kz = g.count(2) / 2;
  for (int j = 0; j < g.count(1); ++j)
    for (int i = 0; i < g.count(0); ++i) {
      const Vec3 x = g.position(i, j, kz);
      const double rho = std::hypot(x.x(), x.y()), phi = std::atan2(x.y(), x.x());
      if (rho == 0.0 || rho > 0.25) continue;
      const std::size_t n = g.index(i, j, kz);
      const double j1 = series_j1(k * rho);
      worst = std::max(worst, std::hypot(u.u1[n].real() - j1 * std::cos(phi), u.u2[n].real() - j1 * std::sin(phi)) / j1);
    }
  add(r, worst < 0.01, "small-rho J1 pair rel error %.1e", worst);

  const auto rep = nodal_intersection(u);
  double radial = 0.0;
  std::size_t pts = 0;
  for (const auto& c : rep.curves)
    for (const auto& p : c.points) {
      radial = std::max(radial, std::hypot(p.x(), p.y()));
      ++pts;
    }
  add(r, rep.curves.size() == 1 && pts > 0, "nodal curves %.0f", static_cast<double>(rep.curves.size()));
  add(r, radial < 2 * g.min_spacing(), "max radial deviation %.1e", radial);
  return r;
}

Result knots_links() {
  using namespace ck;
  Result r;
  const Grid g = Grid::box(3, {-1.6, -1.6, -0.6}, {1.6, 1.6, 0.6}, {103, 103, 39},
                           {Boundary::clamped, Boundary::clamped, Boundary::clamped});
  const Torus torus{Vec3::Zero(), Vec3::UnitZ(), 1.0, 0.6};
  const Vec3 start(1.4, 0.0, 0.0);
  const auto knot = trace_field_line(torus_field(g, 1.5), start, 60.0);
  bool trefoil = knot.closed;
  if (trefoil) {
    const auto w = torus_winding(knot, torus);
    trefoil = w.p == 2 && w.q == 3;
  }
  add(r, trefoil, "slope 3/2 closes as (2,3): %.0f", trefoil);
  const auto open = trace_field_line(torus_field(g, 1 / std::sqrt(2.0)), start, 60.0);
  add(r, !open.closed, "slope 1/sqrt2 closed: %.0f", open.closed);

  const auto ring = [](int n) { return circle(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), n); };
  const auto partner = [](int n) { return circle(Vec3(1, 0, 0), Vec3::UnitX(), -Vec3::UnitZ(), n); };
  const double lk = linking_number(ring(512), partner(512)).raw;
  add(r, std::abs(lk - 1.0) < 1e-3, "Hopf Lk %.6f", lk);
  Curve3D rev = partner(512);
  std::reverse(rev.points.begin(), rev.points.end());
  const double lr = linking_number(ring(512), rev).raw;
  add(r, std::abs(lr + lk) < 1e-9, "reversed Lk %.6f", lr);
  const double drift = std::abs(linking_number(ring(256), partner(256)).raw - linking_number(ring(1024), partner(1024)).raw);
  add(r, drift < 1e-3, "256 vs 1024 segments %.1e", drift);
  return r;
}

Result variational_tise() {
  using namespace tise;
  Result r;
  auto line = [](double lo, double hi, double h) {
    const int n = static_cast<int>(std::lround((hi - lo) / h)) + 1;
    return Grid::box(1, {lo, 0, 0}, {hi, 0, 0}, {n, 1, 1}, {Boundary::clamped, Boundary::clamped, Boundary::clamped});
  };
  auto bump = [](const Grid& g, double lo, double hi) {
    return ScalarField::sample(g, [&](const Vec3& x) {
      const double s = (x.x() - lo) / (hi - lo);
      return s * (1 - s) * (1 + 0.5 * s);
    });
  };
  auto monotone = [](const VariationalState& s) {
    for (std::size_t i = 1; i < s.energy_log.size(); ++i)
      if (s.energy_log[i] > s.energy_log[i - 1]) return false;
    return true;
  };
  const auto box = Potential::free();
  const Grid gb = line(0, 1, 1.0 / 256);
  const auto sb = minimize(box, bump(gb, 0, 1));
  add(r, std::abs(sb.E / (pi * pi / 2) - 1) < 5e-3, "box E %.6f", sb.E);
  add(r, std::abs(functional_J(sb.psi, box, sb.E).J) < 1e-4, "box |J| %.1e", std::abs(functional_J(sb.psi, box, sb.E).J));
  add(r, hj_integral_identity(sb, box) < 1e-4, "box identity %.1e", hj_integral_identity(sb, box));
  const auto osc = Potential::harmonic(1.0);
  const Grid go = line(-8, 8, 1.0 / 16);
  const auto so = minimize(osc, bump(go, -8, 8));
  add(r, std::abs(so.E / 0.5 - 1) < 5e-3, "oscillator E %.6f", so.E);
  add(r, std::abs(functional_J(so.psi, osc, so.E).J) < 1e-4, "oscillator |J| %.1e",
      std::abs(functional_J(so.psi, osc, so.E).J));
  add(r, hj_integral_identity(so, osc) < 1e-4, "oscillator identity %.1e", hj_integral_identity(so, osc));
  add(r, monotone(sb) && monotone(so), "monotone %.0f", monotone(sb) && monotone(so));
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Result determinism() {
  Result r;
  const std::vector<std::string> runs = {
      "photon --n 32 --steps 20 --stencil 4 --out photon.json --field F",
      "scalar --wave stationary --mass 1 --n 33 --out scalar.json --write-series snap",
      "rays --out rays.json --csv rays.csv",
      "huygens --seed 17 --out huygens.json",
      "modes --domain square --count 6 --h 1/128 --out modes.json",
      "chladni --h 1/64 --sines 2:1:1 1:2:1 --out chladni.json --csv chladni.csv --svg chladni.svg",
      "ck --out ck.json --csv ck.csv",
      "knots --slope 3/2 --tubes 2/5 1/5 --out knots.json --csv knots.csv",
      "tise --init random --seed 7 --h 1/128 --out tise.json --log tise.csv --psi psi"};
  const auto base = std::filesystem::temp_directory_path() / "optiq_acceptance";
  std::filesystem::remove_all(base);
  int bad = 0, files = 0;
  for (int rep = 0; rep < 2; ++rep) {
    const auto dir = base / std::to_string(rep);
    std::filesystem::create_directories(dir);
    for (const auto& args : runs) {
      const std::string cmd = "OPTIQ_OUTPUT_DIR='" + dir.string() + "' '" OPTIQ_CLI_PATH "' " + args;
      if (std::system(cmd.c_str()) != 0) {
        ++bad;
        std::printf("     command failed: %s\n", args.c_str());
      }
    }
  }
  for (const auto& e : std::filesystem::directory_iterator(base / "0")) {
    ++files;
    const auto twin = base / "1" / e.path().filename();
    if (!std::filesystem::exists(twin) || slurp(e.path()) != slurp(twin)) {
      ++bad;
      std::printf("     differs: %s\n", e.path().filename().c_str());
    }
  }
  std::filesystem::remove_all(base);
  add(r, files > 0, "files compared %.0f", files);
  add(r, bad == 0, "mismatches or failed runs %.0f", bad);
  return r;
}

}  // namespace

int main() {
  criterion(1, "photon evolution", 60, photon_evolution);
  criterion(2, "continuity audits", 60, continuity_audits);
  criterion(3, "stationary ansatz identities", 5, stationary_identities);
  criterion(4, "eikonal transport", 30, eikonal_transport);
  criterion(5, "Huygens chain", 30, huygens_chain);
  criterion(6, "Chladni spectrum", 120, chladni_spectrum);
  criterion(7, "degenerate superposition nodal set", 10, degenerate_nodal);
  criterion(8, "CK field", 60, ck_field);
  criterion(9, "knots and links", 60, knots_links);
  criterion(10, "variational TISE", 120, variational_tise);
  criterion(11, "determinism", 600, determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
