#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "optiq/huygens_equiv.hpp"

using namespace optiq;
using namespace optiq::huygens;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

Grid plane_grid(int n) {
  return Grid::box(2, {0, 0, 0}, {1, 1, 0}, {n, n, 1}, {Boundary::periodic, Boundary::periodic, Boundary::periodic});
}

// Direct product-rule expansion of lambda^-1 L[lambda phi] for
// lambda = exp(alpha t + g x), written out term by term.
WaveOperator expand_by_hand(const WaveOperator& L, Complex alpha, Complex g) {
  WaveOperator out;
  // d_tt(lambda phi) / lambda = phi_tt + 2 alpha phi_t + alpha^2 phi
  // d_t(lambda phi) / lambda  = phi_t + alpha phi
  // d_xx(lambda phi) / lambda = phi_xx + 2 g phi_x + g^2 phi
  // d_x(lambda phi) / lambda  = phi_x + g phi
  out.a2t = L.a2t;
  out.a1t = L.a2t * 2.0 * alpha + L.a1t;
  out.alap = L.alap;
  out.a1x = {L.alap * 2.0 * g + L.a1x[0], L.a1x[1], L.a1x[2]};
  out.a0 = L.a2t * alpha * alpha + L.a1t * alpha + L.alap * g * g + L.a1x[0] * g + L.a0;
  return out;
}

void check_close(const WaveOperator& a, const WaveOperator& b, double tol = 1e-14) {
  CHECK(std::abs(a.a2t - b.a2t) <= tol);
  CHECK(std::abs(a.a1t - b.a1t) <= tol);
  CHECK(std::abs(a.alap - b.alap) <= tol);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a.a1x[i] - b.a1x[i]) <= tol);
  CHECK(std::abs(a.a0 - b.a0) <= tol);
}

std::vector<SpaceTimeFunction> random_trig(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(1, 2);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  std::vector<SpaceTimeFunction> out;
  for (int i = 0; i < count; ++i) {
    const int kx = wave(rng), ky = wave(rng);
    const double w = u(rng) / 2, p = u(rng);
    out.push_back([=](const Vec3& x, double t) {
      return Complex(std::sin(2 * pi * kx * x.x() + w * t + p), std::cos(2 * pi * ky * x.y() - w * t));
    });
  }
  return out;
}

}  // namespace

TEST_CASE("temporal gauge gives the damped display") {
  const double al = 0.75;
  const auto op = conjugate_operator(dalembert(), GaugeFactor::temporal(al));
  CHECK(op.a2t == 1.0);
  CHECK(op.a1t == 2 * al);
  CHECK(op.alap == -1.0);
  CHECK(op.a0 == al * al);
  for (const auto& c : op.a1x) CHECK(c == 0.0);

  CHECK(conjugate_operator(dalembert(), GaugeFactor::identity()) == dalembert());
  WaveOperator messy{2.0 + I, 0.5, -3.0, {I, 2.0, -I}, 4.0};
  CHECK(conjugate_operator(messy, GaugeFactor::identity()) == messy);
}

TEST_CASE("symbolic rule matches a hand expansion") {
  const WaveOperator L{1.5, 0.25 - I, -2.0, {0.5 * I, 0, 0}, 3.0};
  const Complex alpha(0.3, -0.2), g(-0.7, 1.1);
  GaugeFactor lam = GaugeFactor::temporal(alpha);
  lam.gamma = {g, 0.0, 0.0};
  check_close(conjugate_operator(L, lam), expand_by_hand(L, alpha, g), 1e-14);
}

TEST_CASE("two phase factors along x") {
  const double a = 0.5, b = 0.25, c = 0.125;
  const auto t = conjugate_operator(dalembert(), GaugeFactor::temporal(a));
  const auto s1 = conjugate_operator(t, GaugeFactor::spatial({I * b, 0.0, 0.0}));
  const auto s2 = conjugate_operator(s1, GaugeFactor::spatial({-I * c, 0.0, 0.0}));
  CHECK(s2.a1x[0] == -2.0 * I * b + 2.0 * I * c);
  CHECK(s2.a0 == Complex(a * a + (b - c) * (b - c)));

  // With b = c the first-order x terms cancel and the product gauge is trivial.
  const auto e1 = conjugate_operator(t, GaugeFactor::spatial({I * b, 0.0, 0.0}));
  const auto e2 = conjugate_operator(e1, GaugeFactor::spatial({-I * b, 0.0, 0.0}));
  CHECK(e2.a1x[0] == 0.0);
  CHECK(e2 == t);
}

TEST_CASE("composition and round trip are exact") {
  const WaveOperator L{1.0, 0.5, -1.0, {0.25, 0, -0.5}, 0.125};
  GaugeFactor g1 = GaugeFactor::temporal(0.5);
  g1.gamma = {0.25, -0.5 * I, 0.0};
  GaugeFactor g2 = GaugeFactor::temporal(-0.25 * I);
  g2.gamma = {0.5, 0.0, 0.125};
  CHECK(conjugate_operator(conjugate_operator(L, g1), g2) == conjugate_operator(L, compose(g1, g2)));
  CHECK(conjugate_operator(conjugate_operator(L, g1), g1.inverse()) == L);

  const auto rho = GaugeFactor::multiplier(4.0);
  CHECK(conjugate_operator(conjugate_operator(L, rho), rho.inverse()) == L);
  const auto aff = GaugeFactor::affine(2.0, 0.5);
  CHECK(conjugate_operator(conjugate_operator(L, aff), aff.inverse()) == L);
}

TEST_CASE("multiplier and affine rules") {
  const auto scaled = conjugate_operator(dalembert(), GaugeFactor::multiplier(3.0));
  CHECK(scaled.a2t == 3.0);
  CHECK(scaled.alap == -3.0);
  // Rescaling time by c turns the unit-speed operator into d_tt/c^2 - lap.
  const auto slow = conjugate_operator(dalembert(), GaugeFactor::affine(2.0, 1.0));
  CHECK(slow.a2t == 0.25);
  CHECK_THROWS_AS(GaugeFactor::multiplier(-1.0), ContractError);
  CHECK_THROWS_AS(GaugeFactor::affine(0.0, 1.0), ContractError);
}

TEST_CASE("unsupported gauge names list the supported kinds") {
  CHECK(GaugeFactor::from_name("temporal", 2.0, {}, 1, 1, 1).alpha == 2.0);
  CHECK_THROWS_WITH_AS(GaugeFactor::from_name("conformal", 0.0, {}, 1, 1, 1),
                       doctest::Contains("supported: identity, temporal, spatial"), ContractError);
}

TEST_CASE("operator validation") {
  WaveOperator bad;
  bad.a2t = 0.0;
  CHECK_THROWS_AS(conjugate_operator(bad, GaugeFactor::identity()), ContractError);
}

TEST_CASE("telegrapher chain") {
  const auto ch = build_telegrapher(1.0);
  CHECK(ch.b == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(ch.b == ch.c);
  CHECK(ch.telegrapher == telegrapher(1.0));
  CHECK(ch.temporal.a0 == 1.0);
  CHECK(std::abs(ch.second_spatial.a1x[0]) == 0.0);
  // Conjugation cannot remove the a^2 term: b = c makes the x factors cancel.
  CHECK(std::abs(ch.second_spatial.a0 - 1.0) < 1e-15);
  CHECK_FALSE(ch.reached);
  CHECK(std::abs(ch.constant_gap - 1.0) < 1e-15);

  const auto zero = build_telegrapher(0.0);
  CHECK(zero.telegrapher == dalembert());
  CHECK(zero.reached);
}

TEST_CASE("damped d'Alembert solutions") {
  const double a = 0.5;
  const auto ch = build_telegrapher(a);
  const SpaceTimeFunction phi = [&](const Vec3& x, double t) {
    return std::exp(-a * t) * std::sin(2 * pi * (x.x() - t));
  };
  auto res = [&](const WaveOperator& L, int n) {
    const Grid g = plane_grid(n);
    const double dt = 1.0 / n;
    return operator_residual(L, phi, g, 0.0, dt, 5);
  };
  // e^{-at} f(x - t) is annihilated by the conjugated operator.
  CHECK(res(ch.second_spatial, 64) / res(ch.second_spatial, 128) == doctest::Approx(4.0).epsilon(0.1));
  // The bare telegrapher misses by a^2 |phi|.
  CHECK(res(ch.telegrapher, 128) == doctest::Approx(a * a).epsilon(0.05));
}

TEST_CASE("telegrapher to Klein-Gordon") {
  const auto zero = telegrapher_to_kg(0.0);
  CHECK(zero.klein_gordon == dalembert());

  const auto two = telegrapher_to_kg(2.0);
  CHECK(two.substituted.a1t == 0.0);
  CHECK(two.substituted.a0 == -4.0);
  CHECK(two.klein_gordon.a1t == 0.0);
  CHECK(two.klein_gordon.a0 == 4.0);
  CHECK(two.klein_gordon.alap == -1.0);

  const double m = 2.0, k = 2 * pi, w = std::sqrt(k * k + m * m);
  const SpaceTimeFunction wave = [&](const Vec3& x, double t) { return std::exp(I * (k * x.x() - w * t)); };
  auto res = [&](int n) { return operator_residual(two.klein_gordon, wave, plane_grid(n), 0.0, 1.0 / n, 5); };
  CHECK(res(64) / res(128) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("equivalence residual") {
  const auto fns = random_trig(5, 17);
  const Grid g = plane_grid(32);
  const auto id = GaugeFactor::identity();
  CHECK(equivalence_residual(dalembert(), dalembert(), id, fns, g, 0.0, 1.0 / 32, 4) == 0.0);

  const auto lam = GaugeFactor::temporal(0.8);
  const auto Lt = conjugate_operator(dalembert(), lam);
  auto res = [&](int n) { return equivalence_residual(dalembert(), Lt, lam, fns, plane_grid(n), 0.0, 1.0 / n, 5); };
  const double r64 = res(64), r128 = res(128);
  CHECK(r64 > 0.0);
  CHECK(r64 / r128 == doctest::Approx(4.0).epsilon(0.2));

  const auto spatial = GaugeFactor::spatial({0.5 * I, -0.25, 0.0});
  const auto Ls = conjugate_operator(dalembert(), spatial);
  // exp(gamma . x) is not periodic, so this one runs on a clamped square.
  auto rs = [&](int n) {
    const Grid sq = Grid::cube(2, 0.0, 1.0, n + 1, Boundary::clamped);
    return equivalence_residual(dalembert(), Ls, spatial, fns, sq, 0.0, 1.0 / n, 5);
  };
  CHECK(rs(64) / rs(128) == doctest::Approx(4.0).epsilon(0.2));

  // Negative control: a wrong constant term leaves a residual of its size times |phi|.
  WaveOperator wrong = Lt;
  wrong.a0 += 0.5;
  CHECK(res(64) < 0.05);
  CHECK(equivalence_residual(dalembert(), wrong, lam, fns, plane_grid(64), 0.0, 1.0 / 64, 5) > 0.4);

  const auto rho = GaugeFactor::multiplier(2.0);
  CHECK(equivalence_residual(dalembert(), conjugate_operator(dalembert(), rho), rho, fns, g, 0.0, 1.0 / 32, 4) <
        1e-10);
  CHECK_THROWS_AS(equivalence_residual(dalembert(), dalembert(), GaugeFactor::affine(2, 1), fns, g, 0, 0.1, 4),
                  ContractError);
}
