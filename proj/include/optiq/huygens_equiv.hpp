#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "optiq/grid.hpp"

namespace optiq::huygens {

/// a2t d_tt + a1t d_t + alap lap + sum_i a1x[i] d_i + a0, constant coefficients.
struct WaveOperator {
  Complex a2t = 1.0;
  Complex a1t = 0.0;
  Complex alap = -1.0;
  std::array<Complex, 3> a1x{0.0, 0.0, 0.0};
  Complex a0 = 0.0;

  bool operator==(const WaveOperator&) const = default;
};

/// d_tt - lap.
WaveOperator dalembert();
/// Throws ContractError when a2t vanishes or a coefficient is not finite.
void validate(const WaveOperator& op);

enum class GaugeKind { exponential, multiplier, affine };

/// One of the admissible transformations:
///   exponential  lambda = exp(alpha t + gamma . x), used as lambda^-1 L[lambda .]
///   multiplier   rho L with constant rho > 0
///   affine       t = time_scale t', x = space_scale x'
struct GaugeFactor {
  GaugeKind kind = GaugeKind::exponential;
  Complex alpha = 0.0;
  std::array<Complex, 3> gamma{0.0, 0.0, 0.0};
  double rho = 1.0;
  double time_scale = 1.0;
  double space_scale = 1.0;

  static GaugeFactor identity();
  /// exp(alpha t).
  static GaugeFactor temporal(Complex alpha);
  /// exp(gamma . x); pass i*beta for the phase factor exp(i beta . x).
  static GaugeFactor spatial(std::array<Complex, 3> gamma);
  static GaugeFactor multiplier(double rho);
  static GaugeFactor affine(double time_scale, double space_scale);
  /// Builds a gauge from a kind name; unknown names throw ContractError listing
  /// the supported kinds.
  static GaugeFactor from_name(const std::string& kind, Complex alpha, std::array<Complex, 3> gamma, double rho,
                               double time_scale, double space_scale);

  /// lambda(x, t) for exponential gauges.
  Complex value(const Vec3& x, double t) const;
  GaugeFactor inverse() const;
};

/// Product of two exponential gauges.
GaugeFactor compose(const GaugeFactor& first, const GaugeFactor& second);

/// Coefficients of lambda^-1 L[lambda .], rho L, or L in rescaled variables.
WaveOperator conjugate_operator(const WaveOperator& L, const GaugeFactor& g);

/// Samples of phi(x, t) at t = t0 + n dt, n = 0..count-1.
using SpaceTimeFunction = std::function<Complex(const Vec3&, double)>;
std::vector<ScalarField> sample_series(const Grid& grid, const SpaceTimeFunction& fn, double t0, double dt, int count);

/// `count` smooth periodic test functions on the unit square,
/// sin(2 pi kx x + w t + p) + i cos(2 pi ky y - w t) with kx, ky in {1, 2} and
/// random phases, reproducible from `seed`.
std::vector<SpaceTimeFunction> random_test_functions(int count, unsigned long seed);

/// Applies L with second-order differences at every interior time level; the
/// result has count - 2 entries, entry n at time level n + 1.
std::vector<ScalarField> apply_operator(const WaveOperator& L, const std::vector<ScalarField>& series, double dt);

/// Max |Lt[phi] - lambda^-1 L[lambda phi]| over interior nodes and times and the
/// test functions. Multipliers compare against rho L[phi]. Affine gauges are
/// rejected.
double equivalence_residual(const WaveOperator& L, const WaveOperator& Lt, const GaugeFactor& g,
                            const std::vector<SpaceTimeFunction>& testfns, const Grid& grid, double t0, double dt,
                            int count);

/// Max |L[phi]| over interior nodes and times.
double operator_residual(const WaveOperator& L, const SpaceTimeFunction& phi, const Grid& grid, double t0, double dt,
                         int count);

/// The d'Alembert to telegrapher chain with b = c and a^2 = 2 b^2.
struct TelegrapherChain {
  double a = 0.0, b = 0.0, c = 0.0;
  WaveOperator dalembert;
  /// After exp(a t).
  WaveOperator temporal;
  /// After exp(i b x).
  WaveOperator first_spatial;
  /// After exp(-i c x).
  WaveOperator second_spatial;
  /// d_tt + 2a d_t - lap, the target operator.
  WaveOperator telegrapher;
  /// True when the conjugation chain lands on the target exactly.
  bool reached = false;
  /// second_spatial.a0 - telegrapher.a0.
  Complex constant_gap = 0.0;
};

TelegrapherChain build_telegrapher(double a);

/// d_tt + 2a d_t - lap.
WaveOperator telegrapher(Complex a);

struct KleinGordonChain {
  double m = 0.0;
  /// Telegrapher with a = -m.
  WaveOperator telegrapher;
  /// After phi = exp(m t) psi: d_tt - lap - m^2.
  WaveOperator substituted;
  /// After m -> i m: d_tt - lap + m^2.
  WaveOperator klein_gordon;
};

KleinGordonChain telegrapher_to_kg(double m);

}  // namespace optiq::huygens
