#include "optiq/maxwell_rs.hpp"

#include <cmath>

namespace optiq::photon {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_real(const VectorField3& v, const char* what) {
  for (int a = 0; a < 3; ++a)
    for (std::size_t n = 0; n < v.size(); ++n)
      if (v[a][n].imag() != 0.0) throw ContractError(std::string(what) + " must be real-valued");
}

void require_helicity(int helicity) {
  if (helicity != 1 && helicity != -1) throw ContractError("helicity must be +1 or -1");
}

VectorField3 rhs(const VectorField3& F, int helicity, double c, CurlStencil stencil) {
  VectorField3 out = stencil == CurlStencil::fourth_order ? curl4(F) : curl(F);
  out *= Complex(0.0, -helicity * c);
  return out;
}

}  // namespace

RSField rs_build(const VectorField3& E, const VectorField3& H, int helicity, double c) {
  require_helicity(helicity);
  require_same_grid(E.grid(), H.grid(), "rs_build");
  require_finite(E, "rs_build E");
  require_finite(H, "rs_build H");
  require_real(E, "E");
  require_real(H, "H");
  if (!(c > 0.0)) throw ContractError("speed of light must be positive");
  RSField f{E + H * Complex(0.0, helicity), helicity, c};
  f.F *= kInvSqrt2;
  return f;
}

RSField circular_plane_wave(const Grid& grid, double k, int helicity, double t, double c) {
  require_helicity(helicity);
  const auto E = VectorField3::sample(grid, [&](const Vec3& x) {
    const double ph = k * x.z() - c * k * t;
    return Vec3(std::cos(ph), -helicity * std::sin(ph), 0);
  });
  const auto H = VectorField3::sample(grid, [&](const Vec3& x) {
    const double ph = k * x.z() - c * k * t;
    return Vec3(helicity * std::sin(ph), std::cos(ph), 0);
  });
  return rs_build(E, H, helicity, c);
}

VectorField3 electric(const RSField& f) {
  VectorField3 E = f.F.real_part();
  E *= std::sqrt(2.0);
  return E;
}

VectorField3 magnetic(const RSField& f) {
  VectorField3 H(f.F.grid());
  for (int a = 0; a < 3; ++a)
    for (std::size_t n = 0; n < H.size(); ++n) H[a][n] = f.helicity * std::sqrt(2.0) * f.F[a][n].imag();
  return H;
}

ScalarField energy_density(const RSField& f) { return hdot(f.F, f.F).real_part(); }

ScalarField energy_density(const VectorField3& E, const VectorField3& H) {
  ScalarField eps = dot(E, E) + dot(H, H);
  eps *= 0.5;
  return eps.real_part();
}

double total_energy(const RSField& f) { return integrate(energy_density(f)).real(); }

PhotonState photon_normalize(const RSField& f) {
  const double energy = total_energy(f);
  if (!(energy > 0.0)) throw ContractError("null total energy");
  PhotonState s{f.F, energy};
  s.psi *= 1.0 / std::sqrt(energy);
  return s;
}

double probability_norm(const PhotonState& s) { return integrate(hdot(s.psi, s.psi)).real(); }

RSField evolve(const RSField& f, double dt, int steps, EvolveOptions opts) {
  auto series = evolve_series(f, dt, 0, opts);  // validates inputs
  RSField state = std::move(series.front());
  const double c = f.c;
  const int hel = f.helicity;
  for (int s = 0; s < steps; ++s) {
    const VectorField3& F = state.F;
    const VectorField3 k1 = rhs(F, hel, c, opts.stencil);
    const VectorField3 k2 = rhs(F + k1 * (0.5 * dt), hel, c, opts.stencil);
    const VectorField3 k3 = rhs(F + k2 * (0.5 * dt), hel, c, opts.stencil);
    const VectorField3 k4 = rhs(F + k3 * dt, hel, c, opts.stencil);
    VectorField3 incr = k1 + k4;
    incr += k2 * 2.0;
    incr += k3 * 2.0;
    state.F += incr * (dt / 6.0);
  }
  return state;
}

std::vector<RSField> evolve_series(const RSField& f, double dt, int steps, EvolveOptions opts) {
  require_helicity(f.helicity);
  require_finite(f.F, "evolve");
  const Grid& g = f.F.grid();
  if (g.dim() != 3) throw ContractError("evolve requires a 3D grid");
  for (int a = 0; a < 3; ++a)
    if (g.boundary(a) != Boundary::periodic) throw ContractError("evolve requires periodic boundaries");
  if (!(dt > 0.0) || dt > 0.5 * g.min_spacing() / f.c)
    throw ContractError("time step violates the CFL guard dt <= 0.5*h/c");
  if (steps < 0) throw ContractError("step count must be non-negative");
  std::vector<RSField> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(f);
  for (int s = 0; s < steps; ++s) out.push_back(evolve(out.back(), dt, 1, opts));
  return out;
}

ProbabilityCurrent probability_current(const RSField& f, double energy) {
  if (!(energy > 0.0)) throw ContractError("null total energy");
  ProbabilityCurrent out;
  out.j = cross(electric(f), magnetic(f));
  out.j *= f.c / energy;
  const VectorField3 fxf = cross(f.F.conj(), f.F);
  out.j_rs = VectorField3(f.F.grid());
  for (int a = 0; a < 3; ++a)
    for (std::size_t n = 0; n < fxf.size(); ++n)
      out.j_rs[a][n] = f.c / energy * f.helicity * fxf[a][n].imag();
  out.path_gap = (out.j - out.j_rs).max_abs();
  return out;
}

double continuity_residual(std::span<const RSField> states, double dt) {
  if (states.size() < 3) throw ContractError("continuity audit needs at least 3 snapshots");
  if (!(dt > 0.0)) throw ContractError("time step must be positive");
  const double energy = total_energy(states.front());
  if (!(energy > 0.0)) throw ContractError("null total energy");
  double worst = 0.0;
  for (std::size_t t = 1; t + 1 < states.size(); ++t) {
    ScalarField rate = energy_density(states[t + 1]);
    rate -= energy_density(states[t - 1]);
    rate *= 1.0 / (2.0 * dt * energy);
    rate += divergence(probability_current(states[t], energy).j);
    worst = std::max(worst, max_abs_interior(rate, 1));
  }
  return worst;
}

}  // namespace optiq::photon
