#include "optiq/huygens_equiv.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace optiq::huygens {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_exponential(const GaugeFactor& g, const char* what) {
  if (g.kind != GaugeKind::exponential) throw ContractError(std::string(what) + " needs exponential gauges");
}

}  // namespace

WaveOperator dalembert() { return {}; }

void validate(const WaveOperator& op) {
  if (op.a2t == 0.0) throw ContractError("operator must keep a second time derivative");
  bool ok = finite(op.a2t) && finite(op.a1t) && finite(op.alap) && finite(op.a0);
  for (const Complex& c : op.a1x) ok = ok && finite(c);
  if (!ok) throw ContractError("operator coefficients must be finite");
}

GaugeFactor GaugeFactor::identity() { return {}; }

GaugeFactor GaugeFactor::temporal(Complex alpha) {
  GaugeFactor g;
  g.alpha = alpha;
  return g;
}

GaugeFactor GaugeFactor::spatial(std::array<Complex, 3> gamma) {
  GaugeFactor g;
  g.gamma = gamma;
  return g;
}

GaugeFactor GaugeFactor::multiplier(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ContractError("multiplier must be positive");
  GaugeFactor g;
  g.kind = GaugeKind::multiplier;
  g.rho = rho;
  return g;
}

GaugeFactor GaugeFactor::affine(double time_scale, double space_scale) {
  if (!(time_scale != 0.0 && space_scale != 0.0) || !std::isfinite(time_scale) || !std::isfinite(space_scale))
    throw ContractError("change of variables must be nonsingular");
  GaugeFactor g;
  g.kind = GaugeKind::affine;
  g.time_scale = time_scale;
  g.space_scale = space_scale;
  return g;
}

GaugeFactor GaugeFactor::from_name(const std::string& kind, Complex alpha, std::array<Complex, 3> gamma, double rho,
                                   double time_scale, double space_scale) {
  if (kind == "identity") return identity();
  if (kind == "temporal") return temporal(alpha);
  if (kind == "spatial") return spatial(gamma);
  if (kind == "exponential") {
    GaugeFactor g = temporal(alpha);
    g.gamma = gamma;
    return g;
  }
  if (kind == "multiplier") return multiplier(rho);
  if (kind == "affine") return affine(time_scale, space_scale);
  throw ContractError("unsupported gauge kind '" + kind +
                      "'; supported: identity, temporal, spatial, exponential, multiplier, affine");
}

Complex GaugeFactor::value(const Vec3& x, double t) const {
  require_exponential(*this, "gauge value");
  Complex e = alpha * t;
  for (int a = 0; a < 3; ++a) e += gamma[a] * x[a];
  return std::exp(e);
}

GaugeFactor GaugeFactor::inverse() const {
  GaugeFactor g = *this;
  switch (kind) {
    case GaugeKind::exponential:
      g.alpha = -alpha;
      for (auto& c : g.gamma) c = -c;
      break;
    case GaugeKind::multiplier: g.rho = 1.0 / rho; break;
    case GaugeKind::affine:
      g.time_scale = 1.0 / time_scale;
      g.space_scale = 1.0 / space_scale;
      break;
  }
  return g;
}

GaugeFactor compose(const GaugeFactor& first, const GaugeFactor& second) {
  require_exponential(first, "compose");
  require_exponential(second, "compose");
  GaugeFactor g = first;
  g.alpha += second.alpha;
  for (int a = 0; a < 3; ++a) g.gamma[a] += second.gamma[a];
  return g;
}

WaveOperator conjugate_operator(const WaveOperator& L, const GaugeFactor& g) {
  validate(L);
  WaveOperator out = L;
  switch (g.kind) {
    case GaugeKind::exponential: {
      const Complex al = g.alpha;
      out.a1t = L.a1t + 2.0 * al * L.a2t;
      Complex lap_term = 0.0, drift_term = 0.0;
      for (int a = 0; a < 3; ++a) {
        out.a1x[a] = L.a1x[a] + 2.0 * g.gamma[a] * L.alap;
        lap_term += g.gamma[a] * g.gamma[a];
        drift_term += g.gamma[a] * L.a1x[a];
      }
      out.a0 = L.a0 + al * L.a1t + al * al * L.a2t + drift_term + L.alap * lap_term;
      break;
    }
    case GaugeKind::multiplier:
      out.a2t *= g.rho;
      out.a1t *= g.rho;
      out.alap *= g.rho;
      for (auto& c : out.a1x) c *= g.rho;
      out.a0 *= g.rho;
      break;
    case GaugeKind::affine: {
      const double st = g.time_scale, sx = g.space_scale;
      out.a2t = L.a2t / (st * st);
      out.a1t = L.a1t / st;
      out.alap = L.alap / (sx * sx);
      for (int a = 0; a < 3; ++a) out.a1x[a] = L.a1x[a] / sx;
      break;
    }
  }
  return out;
}

std::vector<SpaceTimeFunction> random_test_functions(int count, unsigned long seed) {
  if (count < 1) throw ContractError("need at least one test function");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(1, 2);
  std::uniform_real_distribution<double> u(0, two_pi);
  std::vector<SpaceTimeFunction> out;
  for (int i = 0; i < count; ++i) {
    const int kx = wave(rng), ky = wave(rng);
    const double w = u(rng) / 2, p = u(rng);
    out.push_back([=](const Vec3& x, double t) {
      return Complex(std::sin(two_pi * kx * x.x() + w * t + p), std::cos(two_pi * ky * x.y() - w * t));
    });
  }
  return out;
}

std::vector<ScalarField> sample_series(const Grid& grid, const SpaceTimeFunction& fn, double t0, double dt, int count) {
  if (count < 0) throw ContractError("sample count must be non-negative");
  std::vector<ScalarField> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const double t = t0 + n * dt;
    out.push_back(ScalarField::sample(grid, [&](const Vec3& x) { return fn(x, t); }));
  }
  return out;
}

std::vector<ScalarField> apply_operator(const WaveOperator& L, const std::vector<ScalarField>& series, double dt) {
  validate(L);
  if (series.size() < 3) throw ContractError("operator evaluation needs at least 3 time levels");
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  const Grid& g = series.front().grid();
  for (const auto& f : series) {
    require_same_grid(g, f.grid(), "time series");
    require_finite(f, "time series");
  }
  std::vector<ScalarField> out;
  for (std::size_t n = 1; n + 1 < series.size(); ++n) {
    const ScalarField& prev = series[n - 1];
    const ScalarField& cur = series[n];
    const ScalarField& next = series[n + 1];
    ScalarField r = (next + prev - cur * 2.0) * (L.a2t / (dt * dt));
    r += (next - prev) * (L.a1t / (2.0 * dt));
    if (L.alap != 0.0) r += laplacian(cur) * L.alap;
    for (int a = 0; a < g.dim(); ++a)
      if (L.a1x[a] != 0.0) r += partial(cur, a) * L.a1x[a];
    r += cur * L.a0;
    out.push_back(std::move(r));
  }
  return out;
}

double equivalence_residual(const WaveOperator& L, const WaveOperator& Lt, const GaugeFactor& g,
                            const std::vector<SpaceTimeFunction>& testfns, const Grid& grid, double t0, double dt,
                            int count) {
  if (g.kind == GaugeKind::affine) throw ContractError("affine gauges have no pointwise residual");
  double worst = 0.0;
  for (const auto& fn : testfns) {
    const auto phi = sample_series(grid, fn, t0, dt, count);
    const auto lhs = apply_operator(Lt, phi, dt);
    std::vector<ScalarField> rhs;
    if (g.kind == GaugeKind::multiplier) {
      rhs = apply_operator(L, phi, dt);
      for (auto& f : rhs) f *= g.rho;
    } else {
      const auto lam_phi = sample_series(grid, [&](const Vec3& x, double t) { return g.value(x, t) * fn(x, t); },
                                         t0, dt, count);
      rhs = apply_operator(L, lam_phi, dt);
      for (std::size_t n = 0; n < rhs.size(); ++n) {
        const double t = t0 + static_cast<double>(n + 1) * dt;
        rhs[n] *= ScalarField::sample(grid, [&](const Vec3& x) { return 1.0 / g.value(x, t); });
      }
    }
    for (std::size_t n = 0; n < lhs.size(); ++n) worst = std::max(worst, max_abs_interior(lhs[n] - rhs[n], 1));
  }
  return worst;
}

double operator_residual(const WaveOperator& L, const SpaceTimeFunction& phi, const Grid& grid, double t0, double dt,
                         int count) {
  double worst = 0.0;
  for (const auto& r : apply_operator(L, sample_series(grid, phi, t0, dt, count), dt))
    worst = std::max(worst, max_abs_interior(r, 1));
  return worst;
}

WaveOperator telegrapher(Complex a) {
  WaveOperator op;
  op.a1t = 2.0 * a;
  return op;
}

TelegrapherChain build_telegrapher(double a) {
  if (!std::isfinite(a)) throw ContractError("damping must be finite");
  TelegrapherChain ch;
  ch.a = a;
  ch.b = ch.c = std::abs(a) / std::sqrt(2.0);
  ch.dalembert = dalembert();
  ch.temporal = conjugate_operator(ch.dalembert, GaugeFactor::temporal(a));
  ch.first_spatial = conjugate_operator(ch.temporal, GaugeFactor::spatial({Complex(0, ch.b), 0.0, 0.0}));
  ch.second_spatial = conjugate_operator(ch.first_spatial, GaugeFactor::spatial({Complex(0, -ch.c), 0.0, 0.0}));
  ch.telegrapher = telegrapher(a);
  ch.reached = ch.second_spatial == ch.telegrapher;
  ch.constant_gap = ch.second_spatial.a0 - ch.telegrapher.a0;
  return ch;
}

KleinGordonChain telegrapher_to_kg(double m) {
  if (!std::isfinite(m)) throw ContractError("mass must be finite");
  KleinGordonChain ch;
  ch.m = m;
  ch.telegrapher = telegrapher(-m);
  ch.substituted = conjugate_operator(ch.telegrapher, GaugeFactor::temporal(m));
  // Continuation m -> i m applied to both the damping and the substitution.
  const Complex im(0.0, m);
  ch.klein_gordon = conjugate_operator(telegrapher(-im), GaugeFactor::temporal(im));
  return ch;
}

}  // namespace optiq::huygens
