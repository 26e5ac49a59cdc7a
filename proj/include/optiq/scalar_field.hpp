#pragma once

#include <span>
#include <vector>

#include "optiq/grid.hpp"

namespace optiq::scalar {

/// Field value and its time derivative at one instant.
struct ScalarState {
  ScalarField V;
  ScalarField Vdot;
  double c = 1.0;
  double m = 0.0;
  double hbar = 1.0;
};

/// phi = psi(x) e^{-i omega t}.
struct StationaryAnsatz {
  ScalarField psi;
  double omega = 0.0;
};

struct StressEnergy {
  ScalarField T00;
  VectorField3 T0i;
};

struct KGCurrent {
  ScalarField J0;
  /// Contravariant spatial components J^k.
  VectorField3 Jk;
};

struct HelmholtzReduction {
  StationaryAnsatz ansatz;
  double m_tilde_sq = 0.0;
  bool evanescent = false;
};

/// Throws ContractError on mismatched grids, non-finite data or bad constants.
void validate(const ScalarState& s);

/// eps = (|Vdot|^2 / c^2 + grad V . grad V*) / 2.
ScalarField scalar_energy_density(const ScalarState& s);
/// j = -(Vdot* grad V + Vdot grad V*) / 2.
VectorField3 scalar_flux(const ScalarState& s);
/// Max |d eps/dt + div j| over interior nodes and interior snapshots.
double continuity_residual_scalar(std::span<const ScalarState> series, double dt);

/// T00 = |phi_t|^2 / c^2 + |grad phi|^2, T0i = -(phi_t* d_i phi + phi_t d_i phi*) / c.
StressEnergy stress_energy(const ScalarState& s);

/// J0 = i(phi* phi_t - phi_t* phi), J^k = -i(phi* d_k phi - d_k phi* phi).
/// With `normalized` both are scaled by hbar / 2m (requires m > 0).
KGCurrent kg_current(const ScalarState& s, bool normalized);
double total_charge(const ScalarField& J0);

/// Max |V_tt / c^2 - lap V + m^2 V| over interior nodes and interior snapshots.
double dalembert_residual(std::span<const ScalarState> series, double dt);

/// Reads the state as psi e^{-i omega t} at t = 0; m_tilde^2 = omega^2/c^2 - m^2.
HelmholtzReduction helmholtz_reduce(const ScalarState& s, double omega);
/// Max |lap psi + m_tilde^2 psi| on nodes at least `margin` away from clamped faces.
double helmholtz_residual(const ScalarField& psi, double m_tilde_sq, int margin = 1);

/// RK4 integration of V_tt = c^2 (lap V - m^2 V) on a periodic grid.
/// Returns steps + 1 snapshots.
std::vector<ScalarState> evolve_kg(const ScalarState& s, double dt, int steps);

}  // namespace optiq::scalar
