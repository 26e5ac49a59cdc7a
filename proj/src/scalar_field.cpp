#include "optiq/scalar_field.hpp"

#include <cmath>

namespace optiq::scalar {

namespace {

void require_series(std::span<const ScalarState> series, double dt) {
  if (series.size() < 3) throw ContractError("residual audit needs at least 3 snapshots");
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  for (const auto& s : series) {
    validate(s);
    require_same_grid(series.front().V.grid(), s.V.grid(), "snapshot series");
  }
}

// conj(a) * b + a * conj(b) = 2 Re(conj(a) b), kept real.
ScalarField sym_product(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = 2.0 * (std::conj(a[n]) * b[n]).real();
  return out;
}

// i (conj(a) b - conj(b) a) = -2 Im(conj(a) b).
ScalarField charge_product(const ScalarField& a, const ScalarField& b) {
  ScalarField out(a.grid());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = -2.0 * (std::conj(a[n]) * b[n]).imag();
  return out;
}

}  // namespace

void validate(const ScalarState& s) {
  require_same_grid(s.V.grid(), s.Vdot.grid(), "scalar state");
  require_finite(s.V, "V");
  require_finite(s.Vdot, "Vdot");
  if (!(s.c > 0.0)) throw ContractError("speed of light must be positive");
  if (!(s.m >= 0.0)) throw ContractError("mass must be non-negative");
  if (!(s.hbar > 0.0)) throw ContractError("hbar must be positive");
}

ScalarField scalar_energy_density(const ScalarState& s) {
  validate(s);
  const VectorField3 g = gradient(s.V);
  ScalarField eps(s.V.grid());
  for (std::size_t n = 0; n < eps.size(); ++n) {
    double e = std::norm(s.Vdot[n]) / (s.c * s.c);
    for (int a = 0; a < 3; ++a) e += std::norm(g[a][n]);
    eps[n] = 0.5 * e;
  }
  return eps;
}

VectorField3 scalar_flux(const ScalarState& s) {
  validate(s);
  const VectorField3 g = gradient(s.V);
  VectorField3 j(s.V.grid());
  for (int a = 0; a < 3; ++a) {
    j[a] = sym_product(s.Vdot, g[a]);
    j[a] *= -0.5;
  }
  return j;
}

double continuity_residual_scalar(std::span<const ScalarState> series, double dt) {
  require_series(series, dt);
  double worst = 0.0;
  for (std::size_t t = 1; t + 1 < series.size(); ++t) {
    ScalarField rate = scalar_energy_density(series[t + 1]);
    rate -= scalar_energy_density(series[t - 1]);
    rate *= 1.0 / (2.0 * dt);
    rate += divergence(scalar_flux(series[t]));
    worst = std::max(worst, max_abs_interior(rate, 1));
  }
  return worst;
}

StressEnergy stress_energy(const ScalarState& s) {
  validate(s);
  const VectorField3 g = gradient(s.V);
  StressEnergy out{ScalarField(s.V.grid()), VectorField3(s.V.grid())};
  for (std::size_t n = 0; n < s.V.size(); ++n) {
    double e = std::norm(s.Vdot[n]) / (s.c * s.c);
    for (int a = 0; a < 3; ++a) e += std::norm(g[a][n]);
    out.T00[n] = e;
  }
  for (int a = 0; a < 3; ++a) {
    out.T0i[a] = sym_product(s.Vdot, g[a]);
    out.T0i[a] *= -1.0 / s.c;
  }
  return out;
}

KGCurrent kg_current(const ScalarState& s, bool normalized) {
  validate(s);
  if (normalized && !(s.m > 0.0)) throw ContractError("normalized current requires m > 0");
  const VectorField3 g = gradient(s.V);
  KGCurrent out{charge_product(s.V, s.Vdot), VectorField3(s.V.grid())};
  for (int a = 0; a < 3; ++a) {
    out.Jk[a] = charge_product(s.V, g[a]);
    out.Jk[a] *= -1.0;
  }
  if (normalized) {
    const double f = s.hbar / (2.0 * s.m);
    out.J0 *= f;
    out.Jk *= f;
  }
  return out;
}

double total_charge(const ScalarField& J0) {
  require_finite(J0, "J0");
  return integrate(J0).real();
}

double dalembert_residual(std::span<const ScalarState> series, double dt) {
  require_series(series, dt);
  const double c2 = series.front().c * series.front().c;
  const double m2 = series.front().m * series.front().m;
  double worst = 0.0;
  for (std::size_t t = 1; t + 1 < series.size(); ++t) {
    ScalarField r = series[t + 1].V + series[t - 1].V;
    r -= series[t].V * 2.0;
    r *= 1.0 / (dt * dt * c2);
    r -= laplacian(series[t].V);
    r += series[t].V * m2;
    worst = std::max(worst, max_abs_interior(r, 1));
  }
  return worst;
}

HelmholtzReduction helmholtz_reduce(const ScalarState& s, double omega) {
  validate(s);
  if (!(omega > 0.0)) throw ContractError("omega must be positive");
  HelmholtzReduction out;
  out.ansatz = {s.V, omega};
  out.m_tilde_sq = omega * omega / (s.c * s.c) - s.m * s.m;
  out.evanescent = out.m_tilde_sq < 0.0;
  return out;
}

double helmholtz_residual(const ScalarField& psi, double m_tilde_sq, int margin) {
  require_finite(psi, "psi");
  ScalarField r = laplacian(psi);
  r += psi * m_tilde_sq;
  return max_abs_interior(r, margin);
}

std::vector<ScalarState> evolve_kg(const ScalarState& s, double dt, int steps) {
  validate(s);
  const Grid& g = s.V.grid();
  for (int a = 0; a < g.dim(); ++a)
    if (g.boundary(a) != Boundary::periodic) throw ContractError("evolve_kg requires periodic boundaries");
  if (!(dt > 0.0) || dt > 0.5 * g.min_spacing() / s.c)
    throw ContractError("time step violates the CFL guard dt <= 0.5*h/c");
  if (steps < 0) throw ContractError("step count must be non-negative");

  const double c2 = s.c * s.c, m2 = s.m * s.m;
  auto accel = [&](const ScalarField& V) {
    ScalarField a = laplacian(V);
    a -= V * m2;
    a *= c2;
    return a;
  };
  std::vector<ScalarState> out{s};
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int n = 0; n < steps; ++n) {
    const ScalarState& p = out.back();
    const ScalarField kv1 = p.Vdot, ka1 = accel(p.V);
    const ScalarField kv2 = p.Vdot + ka1 * (0.5 * dt), ka2 = accel(p.V + kv1 * (0.5 * dt));
    const ScalarField kv3 = p.Vdot + ka2 * (0.5 * dt), ka3 = accel(p.V + kv2 * (0.5 * dt));
    const ScalarField kv4 = p.Vdot + ka3 * dt, ka4 = accel(p.V + kv3 * dt);
    ScalarState next = p;
    next.V += (kv1 + kv4 + (kv2 + kv3) * 2.0) * (dt / 6.0);
    next.Vdot += (ka1 + ka4 + (ka2 + ka3) * 2.0) * (dt / 6.0);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace optiq::scalar
