#pragma once

#include <span>
#include <vector>

#include "optiq/grid.hpp"

namespace optiq::photon {

/// Riemann-Silberstein vector F = (E + i*helicity*H)/sqrt(2).
struct RSField {
  VectorField3 F;
  int helicity = 1;
  double c = 1.0;
};

/// Photon wavefunction Psi = F/sqrt(total_energy), normalized to unit probability.
struct PhotonState {
  VectorField3 psi;
  double total_energy = 0.0;
};

RSField rs_build(const VectorField3& E, const VectorField3& H, int helicity, double c = 1.0);

/// Circularly polarized plane wave travelling along +z with wavenumber k at time t:
/// E = (cos ph, -helicity sin ph, 0), H = (helicity sin ph, cos ph, 0), ph = k z - c k t.
RSField circular_plane_wave(const Grid& grid, double k, int helicity, double t = 0.0, double c = 1.0);

/// Recovers the real E and H fields from F.
VectorField3 electric(const RSField& f);
VectorField3 magnetic(const RSField& f);

/// eps = F* . F, real and non-negative.
ScalarField energy_density(const RSField& f);
/// eps = (E^2 + H^2)/2 from the real fields directly.
ScalarField energy_density(const VectorField3& E, const VectorField3& H);
double total_energy(const RSField& f);

PhotonState photon_normalize(const RSField& f);
/// Sum_i integral Psi_i* Psi_i.
double probability_norm(const PhotonState& s);

enum class CurlStencil { second_order, fourth_order };

struct EvolveOptions {
  CurlStencil stencil = CurlStencil::second_order;
};

/// Classical RK4 on dF/dt = -i*helicity*c curl F on a fully periodic 3D grid.
/// Requires dt <= 0.5 * min(h) / c.
RSField evolve(const RSField& f, double dt, int steps, EvolveOptions opts = {});
/// As evolve, returning the initial state and every step (steps + 1 entries).
std::vector<RSField> evolve_series(const RSField& f, double dt, int steps, EvolveOptions opts = {});

struct ProbabilityCurrent {
  VectorField3 j;            ///< (c/energy) E x H
  VectorField3 j_rs;         ///< (c/energy) * helicity * Im(F* x F)
  double path_gap = 0.0;     ///< max |j - j_rs|
};

ProbabilityCurrent probability_current(const RSField& f, double energy);

/// Max |d rho/dt + div j| over interior nodes and interior time samples, with
/// rho = eps / E0 and E0 the energy of the first snapshot.
double continuity_residual(std::span<const RSField> states, double dt);

}  // namespace optiq::photon
