#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "optiq/grid.hpp"

namespace optiq::tise {

/// V(x), mass and hbar on a box with Dirichlet walls (the clamped faces of the grid).
struct Potential {
  std::function<double(const Vec3&)> V;
  /// Samples on the solution grid; used instead of V when set.
  std::optional<ScalarField> samples;
  double m = 1.0;
  double hbar = 1.0;

  static Potential free(double m = 1.0, double hbar = 1.0);
  /// V = m omega^2 |x - center|^2 / 2.
  static Potential harmonic(double omega, double m = 1.0, double hbar = 1.0, const Vec3& center = Vec3::Zero());
  static Potential sampled(ScalarField V, double m = 1.0, double hbar = 1.0);

  /// V at every node of `grid`; throws on non-finite values or a grid mismatch.
  ScalarField on(const Grid& grid) const;
};

/// -hbar^2/2m lap + V restricted to interior nodes, with the grid index of each unknown.
struct Hamiltonian {
  Eigen::SparseMatrix<double> H;
  std::vector<std::size_t> nodes;
};

Hamiltonian hamiltonian(const Grid& grid, const Potential& pot);

/// (-hbar^2/2m lap + V) psi at interior nodes, zero on the walls.
ScalarField apply_hamiltonian(const ScalarField& psi, const Potential& pot);

struct FunctionalValue {
  double J = 0.0;
  /// Integral of psi^2.
  double norm = 0.0;
  /// |norm - 1| <= 1e-10.
  bool normalized = false;
};

/// J = 1/2 integral [ (grad psi)^2 - 2m (E - V) psi^2 / hbar^2 ], with the
/// gradient taken by forward differences along grid edges.
FunctionalValue functional_J(const ScalarField& psi, const Potential& pot, double E);

struct VariationalState {
  ScalarField psi;
  double E = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Rayleigh quotient and TISE residual before each step and at the end.
  std::vector<double> energy_log;
  std::vector<double> residual_log;
};

struct MinimizeOptions {
  double tolerance = 1e-6;
  int max_iterations = 100000;
  /// States projected out of every iterate (excited states by deflation).
  std::vector<ScalarField> deflate;
};

/// Iteration cap reached; carries the best state found.
class MinimizeError : public ConvergenceError {
 public:
  MinimizeError(const std::string& what, VariationalState best)
      : ConvergenceError(what, best.residual_log.empty() ? INFINITY : best.residual_log.back()),
        best_(std::move(best)) {}
  const VariationalState& best() const noexcept { return best_; }

 private:
  VariationalState best_;
};

/// Projected descent on the Rayleigh quotient with renormalization and a
/// backtracking line search. The descent direction is the gradient in the
/// inner product of the shifted Hamiltonian (a Sobolev gradient), projected
/// onto the tangent space of the unit sphere.
VariationalState minimize(const Potential& pot, const ScalarField& psi0, const MinimizeOptions& opts = {});

/// sqrt of the integral of ((-hbar^2/2m lap + V - E) psi)^2 over interior nodes.
double tise_residual(const ScalarField& psi, double E, const Potential& pot);
double tise_residual(const VariationalState& s, const Potential& pot);

/// |integral (grad psi)^2 - (2m/hbar^2) integral (E - V) psi^2|.
double hj_integral_identity(const ScalarField& psi, double E, const Potential& pot);
double hj_integral_identity(const VariationalState& s, const Potential& pot);

}  // namespace optiq::tise
