#include "optiq/schrodinger_var.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

namespace optiq::tise {

namespace {

void check_box(const Grid& g) {
  for (int a = 0; a < g.dim(); ++a) {
    if (g.boundary(a) != Boundary::clamped) throw ContractError("the box needs Dirichlet walls on every axis");
    if (g.count(a) < 3) throw ContractError("the box needs interior nodes on every axis");
  }
}

void check_constants(const Potential& pot) {
  if (!(pot.m > 0.0) || !(pot.hbar > 0.0) || !std::isfinite(pot.m) || !std::isfinite(pot.hbar))
    throw ContractError("mass and hbar must be positive");
}

double kinetic(const Potential& pot) { return pot.hbar * pot.hbar / (2.0 * pot.m); }

// Integral of (grad psi)^2 from forward differences along every grid edge.
double gradient_energy(const ScalarField& psi) {
  const Grid& g = psi.grid();
  double sum = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index3 at = g.unravel(n);
    const int idx[3] = {at.i, at.j, at.k};
    for (int a = 0; a < g.dim(); ++a) {
      if (idx[a] + 1 >= g.count(a)) continue;
      const double d = (psi[n + g.stride(a)].real() - psi[n].real()) / g.spacing(a);
      sum += d * d;
    }
  }
  return sum * g.cell_volume();
}

}  // namespace

Potential Potential::free(double m, double hbar) {
  Potential p;
  p.V = [](const Vec3&) { return 0.0; };
  p.m = m;
  p.hbar = hbar;
  return p;
}

Potential Potential::harmonic(double omega, double m, double hbar, const Vec3& center) {
  if (!(omega > 0.0)) throw ContractError("oscillator frequency must be positive");
  Potential p;
  p.V = [=](const Vec3& x) { return 0.5 * m * omega * omega * (x - center).squaredNorm(); };
  p.m = m;
  p.hbar = hbar;
  return p;
}

Potential Potential::sampled(ScalarField V, double m, double hbar) {
  Potential p;
  p.samples = std::move(V);
  p.m = m;
  p.hbar = hbar;
  return p;
}

ScalarField Potential::on(const Grid& grid) const {
  check_constants(*this);
  ScalarField out;
  if (samples) {
    require_same_grid(samples->grid(), grid, "potential samples");
    out = samples->real_part();
  } else {
    if (!V) throw ContractError("potential has neither a function nor samples");
    out = ScalarField::sample(grid, V);
  }
  require_finite(out, "potential");
  return out;
}

Hamiltonian hamiltonian(const Grid& g, const Potential& pot) {
  check_box(g);
  const ScalarField V = pot.on(g);
  const double c = kinetic(pot);
  Hamiltonian h;
  std::vector<long> unknown(g.size(), -1);
  for (std::size_t n = 0; n < g.size(); ++n)
    if (g.boundary_distance(g.unravel(n)) >= 1) {
      unknown[n] = static_cast<long>(h.nodes.size());
      h.nodes.push_back(n);
    }
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t u = 0; u < h.nodes.size(); ++u) {
    const std::size_t n = h.nodes[u];
    double diag = V[n].real();
    for (int a = 0; a < g.dim(); ++a) {
      const double w = c / (g.spacing(a) * g.spacing(a));
      diag += 2.0 * w;
      for (long nb : {unknown[n - g.stride(a)], unknown[n + g.stride(a)]})
        if (nb >= 0) trip.emplace_back(u, nb, -w);
    }
    trip.emplace_back(u, u, diag);
  }
  const auto size = static_cast<Eigen::Index>(h.nodes.size());
  h.H.resize(size, size);
  h.H.setFromTriplets(trip.begin(), trip.end());
  return h;
}

ScalarField apply_hamiltonian(const ScalarField& psi, const Potential& pot) {
  const Grid& g = psi.grid();
  check_box(g);
  const ScalarField V = pot.on(g);
  const double c = kinetic(pot);
  ScalarField out(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.boundary_distance(g.unravel(n)) < 1) continue;
    Complex acc = V[n] * psi[n];
    for (int a = 0; a < g.dim(); ++a)
      acc += c * (2.0 * psi[n] - psi[n - g.stride(a)] - psi[n + g.stride(a)]) / (g.spacing(a) * g.spacing(a));
    out[n] = acc;
  }
  return out;
}

FunctionalValue functional_J(const ScalarField& psi, const Potential& pot, double E) {
  require_finite(psi, "wavefunction");
  const ScalarField V = pot.on(psi.grid());
  const ScalarField re = psi.real_part();
  FunctionalValue f;
  f.norm = integrate(re * re).real();
  ScalarField weight(psi.grid());
  for (std::size_t n = 0; n < weight.size(); ++n) weight[n] = (E - V[n].real()) * re[n].real() * re[n].real();
  f.J = 0.5 * (gradient_energy(re) - integrate(weight).real() / kinetic(pot));
  f.normalized = std::abs(f.norm - 1.0) <= 1e-10;
  return f;
}

double tise_residual(const ScalarField& psi, double E, const Potential& pot) {
  const ScalarField r = apply_hamiltonian(psi, pot) - psi * E;
  const Grid& g = psi.grid();
  double sum = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (g.boundary_distance(g.unravel(n)) >= 1) sum += std::norm(r[n]);
  return std::sqrt(sum * g.cell_volume());
}

double tise_residual(const VariationalState& s, const Potential& pot) { return tise_residual(s.psi, s.E, pot); }

double hj_integral_identity(const ScalarField& psi, double E, const Potential& pot) {
  return 2.0 * std::abs(functional_J(psi, pot, E).J);
}

double hj_integral_identity(const VariationalState& s, const Potential& pot) {
  return hj_integral_identity(s.psi, s.E, pot);
}

VariationalState minimize(const Potential& pot, const ScalarField& psi0, const MinimizeOptions& opts) {
  const Grid& g = psi0.grid();
  check_box(g);
  require_finite(psi0, "initial state");
  if (!(opts.tolerance > 0.0) || opts.max_iterations < 0) throw ContractError("invalid minimization options");
  const double peak = psi0.max_abs();
  if (peak == 0.0) throw ContractError("initial state is zero");
  for (std::size_t n = 0; n < g.size(); ++n)
    if (g.boundary_distance(g.unravel(n)) < 1 && std::abs(psi0[n]) > 1e-12 * peak)
      throw ContractError("initial state must vanish on the walls");

  const Hamiltonian ham = hamiltonian(g, pot);
  const Eigen::SparseMatrix<double>& H = ham.H;
  const double vol = g.cell_volume();
  const auto size = static_cast<Eigen::Index>(ham.nodes.size());
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return vol * a.dot(b); };
  auto gather = [&](const ScalarField& f) {
    Eigen::VectorXd v(size);
    for (Eigen::Index u = 0; u < size; ++u) v[u] = f[ham.nodes[u]].real();
    return v;
  };

  std::vector<Eigen::VectorXd> defl;
  for (const auto& d : opts.deflate) {
    require_same_grid(g, d.grid(), "deflation state");
    Eigen::VectorXd v = gather(d);
    for (const auto& q : defl) v -= dot(q, v) * q;
    const double nv = std::sqrt(dot(v, v));
    if (!(nv > 0.0)) throw ContractError("deflation states are linearly dependent");
    defl.push_back(v / nv);
  }
  auto project = [&](Eigen::VectorXd& v) {
    for (const auto& q : defl) v -= dot(q, v) * q;
  };
  auto normalize = [&](Eigen::VectorXd& v) {
    const double nv = std::sqrt(dot(v, v));
    if (!(nv > 0.0)) throw ContractError("state vanished after deflation");
    v /= nv;
  };

  // Shifted Hamiltonian: positive definite, defines the descent metric.
  double vmin = INFINITY, lmax = 0.0;
  for (Eigen::Index u = 0; u < size; ++u) vmin = std::min(vmin, H.coeff(u, u));
  for (int a = 0; a < g.dim(); ++a) {
    vmin -= 2.0 * kinetic(pot) / (g.spacing(a) * g.spacing(a));
    lmax = std::max(lmax, g.spacing(a) * (g.count(a) - 1));
  }
  const double delta = kinetic(pot) / (lmax * lmax);
  Eigen::SparseMatrix<double> P = H;
  for (Eigen::Index u = 0; u < size; ++u) P.coeffRef(u, u) += delta - vmin;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> metric(P);
  if (metric.info() != Eigen::Success) throw ContractError("descent metric factorization failed");

  Eigen::VectorXd x = gather(psi0);
  project(x);
  normalize(x);

  VariationalState st;
  auto scatter = [&](const Eigen::VectorXd& v) {
    ScalarField f(g);
    for (Eigen::Index u = 0; u < size; ++u) f[ham.nodes[u]] = v[u];
    return f;
  };
  double alpha = 1.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd Hx = H * x;
    const double E = dot(x, Hx);
    Eigen::VectorXd r = Hx - E * x;
    const double res = std::sqrt(dot(r, r));
    st.energy_log.push_back(E);
    st.residual_log.push_back(res);
    st.E = E;
    st.iterations = it;
    if (res < opts.tolerance) {
      st.converged = true;
      st.psi = scatter(x);
      return st;
    }
    if (it >= opts.max_iterations) {
      st.psi = scatter(x);
      throw MinimizeError("minimization hit the iteration cap", st);
    }
    Eigen::VectorXd s = metric.solve(r);
    project(s);
    s -= dot(x, s) * x;
    const double slope = 2.0 * dot(r, s);
    bool accepted = false;
    Eigen::VectorXd best = x;
    double best_e = E;
    alpha = std::min(1.0, 2.0 * alpha);
    for (int tries = 0; tries < 60; ++tries, alpha *= 0.5) {
      Eigen::VectorXd y = x - alpha * s;
      project(y);
      normalize(y);
      const double Ey = dot(y, H * y);
      if (Ey <= E - 1e-4 * alpha * slope) {
        x = y;
        accepted = true;
        break;
      }
      if (Ey < best_e) {
        best_e = Ey;
        best = y;
      }
    }
    if (!accepted) {
      if (!(best_e < E)) {
        st.psi = scatter(x);
        throw MinimizeError("line search stalled before the residual tolerance", st);
      }
      x = best;
    }
  }
}

}  // namespace optiq::tise
