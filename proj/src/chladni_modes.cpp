#include "optiq/chladni_modes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

namespace optiq::chladni {

namespace {

constexpr int kMinInterior = 32;

Grid problem_grid(const MembraneProblem& p) {
  if (!(p.h > 0.0) || !std::isfinite(p.h)) throw ContractError("membrane resolution must be positive");
  auto count = [&](double len, bool periodic) {
    if (!(len > 0.0) || !std::isfinite(len)) throw ContractError("membrane dimensions must be positive");
    const long n = std::lround(len / p.h) + (periodic ? 0 : 1);
    if (n - (periodic ? 0 : 2) < kMinInterior)
      throw ContractError("domain too coarse: need at least 32 interior nodes per axis");
    return static_cast<int>(n);
  };
  const Boundary bc = p.periodic ? Boundary::periodic : Boundary::clamped;
  switch (p.shape) {
    case Shape::interval: {
      if (p.periodic) throw ContractError("periodic membranes are rectangles only");
      const int n = count(p.a, false);
      return Grid::box(1, {0, 0, 0}, {p.a, 0, 0}, {n, 1, 1}, {bc, bc, bc});
    }
    case Shape::rectangle:
    case Shape::square: {
      const double a = p.shape == Shape::square ? 1.0 : p.a;
      const double b = p.shape == Shape::square ? 1.0 : p.b;
      return Grid::box(2, {0, 0, 0}, {a, b, 0}, {count(a, p.periodic), count(b, p.periodic), 1}, {bc, bc, bc});
    }
    case Shape::disk:
    case Shape::annulus: {
      if (p.periodic) throw ContractError("periodic membranes are rectangles only");
      if (p.shape == Shape::annulus && !(p.inner_radius > 0.0 && p.inner_radius < p.radius))
        throw ContractError("annulus needs 0 < inner radius < radius");
      const int n = count(2.0 * p.radius, false);
      return Grid::box(2, {-p.radius, -p.radius, 0}, {p.radius, p.radius, 0}, {n, n, 1}, {bc, bc, bc});
    }
  }
  throw ContractError("unknown membrane shape");
}

bool node_active(const MembraneProblem& p, const Grid& g, std::size_t idx) {
  const Index3 n = g.unravel(idx);
  switch (p.shape) {
    case Shape::interval:
    case Shape::rectangle:
    case Shape::square:
      if (p.bc == MembraneBC::neumann || p.periodic) return true;
      return g.boundary_distance(n) >= 1;
    case Shape::disk:
    case Shape::annulus: {
      const Vec3 x = g.position(idx);
      const double r = std::hypot(x.x(), x.y());
      const double eps = 1e-12 * p.radius;
      if (r >= p.radius - eps) return false;
      return p.shape == Shape::disk || r > p.inner_radius + eps;
    }
  }
  return false;
}

// Quadrature weight of a node: halved per clamped face it sits on (Neumann rectangles).
double node_weight(const MembraneProblem& p, const Grid& g, std::size_t idx) {
  if (p.bc != MembraneBC::neumann || p.shape == Shape::disk || p.shape == Shape::annulus) return 1.0;
  const Index3 n = g.unravel(idx);
  const int ids[3] = {n.i, n.j, n.k};
  double w = 1.0;
  for (int a = 0; a < g.dim(); ++a)
    if (g.boundary(a) == Boundary::clamped && (ids[a] == 0 || ids[a] == g.count(a) - 1)) w *= 0.5;
  return w;
}

// First component above a small threshold is made positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double m = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-6 * m) {
      if (v[i] < 0) v = -v;
      return;
    }
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
}

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Solves (T - shift) x = b for symmetric tridiagonal T by elimination with
// partial pivoting; zero pivots are nudged to `tiny`.
Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double shift,
                                  Eigen::VectorXd b, double tiny) {
  const Eigen::Index n = d.size();
  // Row i holds a[i] x_i + c[i] x_{i+1} + f[i] x_{i+2} after elimination.
  Eigen::VectorXd a = d.array() - shift, c(n), f = Eigen::VectorXd::Zero(n), lo(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) c[i] = e[i], lo[i + 1] = e[i];
  if (n > 0) c[n - 1] = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(lo[i + 1]) > std::abs(a[i])) {
      std::swap(a[i], lo[i + 1]);
      std::swap(c[i], a[i + 1]);
      std::swap(b[i], b[i + 1]);
      if (i + 2 < n) std::swap(f[i], c[i + 1]);
    }
    if (a[i] == 0.0) a[i] = tiny;
    const double m = lo[i + 1] / a[i];
    a[i + 1] -= m * c[i];
    if (i + 2 < n) c[i + 1] -= m * f[i];
    b[i + 1] -= m * b[i];
  }
  if (a[n - 1] == 0.0) a[n - 1] = tiny;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double r = b[i];
    if (i + 1 < n) r -= c[i] * x[i + 1];
    if (i + 2 < n) r -= f[i] * x[i + 2];
    x[i] = r / a[i];
  }
  return x;
}

// Householder tridiagonalization, eigenvalues of the tridiagonal form, and
// inverse iteration for the wanted vectors only.
EigenPairs dense_modes(const Eigen::SparseMatrix<double>& B, int count) {
  const Eigen::MatrixXd D(B);
  const Eigen::Index n = D.rows();
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(D);
  const Eigen::VectorXd d = tri.diagonal();
  const Eigen::VectorXd e = tri.subDiagonal();
  const double scale = std::max({d.cwiseAbs().maxCoeff(), e.size() ? e.cwiseAbs().maxCoeff() : 0.0, 1.0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d / scale, e / scale, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
  const Eigen::VectorXd values = es.eigenvalues().head(count) * scale;

  double tnorm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    tnorm = std::max(tnorm, std::abs(d[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0));
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = eps * std::max(tnorm, 1.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  Eigen::MatrixXd Z(n, count);
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = ud(rng);
    for (int it = 0; it < 4; ++it) {
      z = tridiagonal_solve(d, e, values[j], z, tiny);
      // Reorthogonalize against close eigenvalues so clusters come out orthonormal.
      for (int twice = 0; twice < 2; ++twice)
        for (int p = 0; p < j; ++p)
          if (std::abs(values[j] - values[p]) < 1e-3 * std::max(tnorm, 1.0)) z -= Z.col(p).dot(z) * Z.col(p);
      z.normalize();
    }
    Z.col(j) = z;
  }
  Eigen::MatrixXd V = tri.matrixQ() * Z;
  return {values, V};
}

// Shift-invert block subspace iteration with Rayleigh-Ritz projection.
EigenPairs sparse_modes(const Eigen::SparseMatrix<double>& B, int count, const SolveOptions& opts) {
  const Eigen::Index n = B.rows();
  const Eigen::Index p = std::min<Eigen::Index>(n, std::max(2 * count, count + 8));
  const double sigma = -1.0;
  Eigen::SparseMatrix<double> S = B;
  for (Eigen::Index i = 0; i < n; ++i) S.coeffRef(i, i) -= sigma;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
  if (ldlt.info() != Eigen::Success) throw ConvergenceError("shifted operator factorization failed", INFINITY);

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = nd(rng);
  X = orthonormal_basis(X);

  double worst = INFINITY;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd Q = orthonormal_basis(ldlt.solve(X));
    const Eigen::MatrixXd BQ = B * Q;
    const Eigen::MatrixXd H = Q.transpose() * BQ;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    X = Q * es.eigenvectors();
    const Eigen::MatrixXd BX = BQ * es.eigenvectors();
    worst = 0.0;
    for (int j = 0; j < count; ++j) {
      const double theta = es.eigenvalues()[j];
      const double r = (BX.col(j) - theta * X.col(j)).norm() / std::max(std::abs(theta), 1.0);
      worst = std::max(worst, r);
    }
    if (worst < opts.tolerance) return {es.eigenvalues().head(count), X.leftCols(count)};
  }
  throw ConvergenceError("eigensolver did not converge within the iteration cap", worst);
}

}  // namespace

std::vector<bool> MembraneOperator::active_mask() const {
  std::vector<bool> m(grid.size(), false);
  for (std::size_t idx : nodes) m[idx] = true;
  return m;
}

MembraneOperator assemble(const MembraneProblem& problem) {
  MembraneOperator op;
  op.problem = problem;
  op.grid = problem_grid(problem);
  const Grid& g = op.grid;
  op.unknown_of.assign(g.size(), -1);
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (node_active(problem, g, idx)) {
      op.unknown_of[idx] = static_cast<long>(op.nodes.size());
      op.nodes.push_back(idx);
    }
  const Eigen::Index n = static_cast<Eigen::Index>(op.nodes.size());
  if (n == 0) throw ContractError("membrane has no active nodes");

  const bool neumann = problem.bc == MembraneBC::neumann;
  std::vector<double> weight(op.nodes.size());
  for (Eigen::Index u = 0; u < n; ++u) weight[u] = node_weight(problem, g, op.nodes[u]);
  op.mass_sqrt.resize(n);
  for (Eigen::Index u = 0; u < n; ++u) op.mass_sqrt[u] = std::sqrt(weight[u]);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (Eigen::Index u = 0; u < n; ++u) {
    const Index3 c = g.unravel(op.nodes[u]);
    const int ids[3] = {c.i, c.j, c.k};
    // Row of A = -lap (ghost mirrors at clamped Neumann faces), scaled by the weight into K.
    std::map<long, double> row;
    double diag = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const int cnt = g.count(a);
      const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
      for (int dir : {-1, 1}) {
        int m = ids[a] + dir;
        if (g.boundary(a) == Boundary::periodic) {
          m = (m + cnt) % cnt;
        } else if (m < 0 || m >= cnt) {
          if (!neumann) continue;
          m = ids[a] - dir;
        }
        int nb[3] = {c.i, c.j, c.k};
        nb[a] = m;
        const long v = op.unknown_of[g.index(nb[0], nb[1], nb[2])];
        if (v < 0) {
          // Dirichlet: the neighbour is a zero boundary value. Neumann masks drop the link.
          if (!neumann) diag += inv_h2;
          continue;
        }
        diag += inv_h2;
        row[v] -= inv_h2;
      }
    }
    row[static_cast<long>(u)] += diag;
    for (const auto& [v, val] : row) {
      const double k = weight[u] * val;
      trip.emplace_back(u, v, k / (op.mass_sqrt[u] * op.mass_sqrt[v]));
    }
  }
  // Rows scaled by the weight are symmetric before the M^{-1/2} scaling; the
  // division by the commutative product s_u s_v keeps B exactly symmetric.
  op.B.resize(n, n);
  op.B.setFromTriplets(trip.begin(), trip.end());
  op.B.makeCompressed();
  return op;
}

std::vector<EigenMode> solve_modes(const MembraneOperator& op, int count, const SolveOptions& opts) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (count < 1 || count > n) throw ContractError("mode count must be between 1 and the unknown count");
  EigenPairs pairs = static_cast<std::size_t>(n) <= opts.dense_limit ? dense_modes(op.B, count)
                                                                     : sparse_modes(op.B, count, opts);
  const double scale = 1.0 / std::sqrt(op.grid.cell_volume());
  std::vector<EigenMode> modes;
  std::vector<double> values;
  for (int j = 0; j < count; ++j) {
    Eigen::VectorXd y = pairs.vectors.col(j);
    fix_sign(y);
    EigenMode m;
    m.lambda = pairs.values[j];
    m.w = ScalarField(op.grid);
    for (Eigen::Index u = 0; u < n; ++u) m.w[op.nodes[u]] = y[u] / op.mass_sqrt[u] * scale;
    const double wmax = m.w.max_abs();
    m.residual = membrane_residual(op, m.w, m.lambda) / (std::max(std::abs(m.lambda), 1.0) * wmax);
    values.push_back(m.lambda);
    modes.push_back(std::move(m));
  }
  const auto clusters = detect_multiplicity(values, op.problem.h, opts.cluster_constant);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i = 0; i < clusters[c].size; ++i) {
      modes[clusters[c].first + i].cluster_id = static_cast<int>(c);
      modes[clusters[c].first + i].multiplicity = static_cast<int>(clusters[c].size);
    }
  return modes;
}

std::vector<Cluster> detect_multiplicity(const std::vector<double>& eigenvalues, double h, double c) {
  if (!(h > 0.0) || !(c >= 0.0)) throw ContractError("clustering needs positive spacing and constant");
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] < eigenvalues[i - 1]) throw ContractError("eigenvalues must be ascending");
  const double tol = std::max(1e-6, c * h * h);
  std::vector<Cluster> out;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (!out.empty()) {
      const double prev = eigenvalues[i - 1], cur = eigenvalues[i];
      const double scale = std::max({std::abs(prev), std::abs(cur), 1.0});
      if ((cur - prev) / scale < tol) {
        ++out.back().size;
        continue;
      }
    }
    out.push_back({i, 1});
  }
  return out;
}

std::vector<EigenMode> cluster_members(const std::vector<EigenMode>& modes, int id) {
  std::vector<EigenMode> out;
  for (const auto& m : modes)
    if (m.cluster_id == id) out.push_back(m);
  return out;
}

std::vector<double> project_coefficients(const std::vector<EigenMode>& modes, const ScalarField& target) {
  std::vector<double> c;
  for (const auto& m : modes) {
    require_same_grid(m.w.grid(), target.grid(), "projection target");
    c.push_back(integrate(m.w * target).real());
  }
  return c;
}

ScalarField superpose(const std::vector<EigenMode>& modes, const std::vector<double>& coefficients) {
  if (modes.empty() || modes.size() != coefficients.size())
    throw ContractError("need one coefficient per mode");
  for (const auto& m : modes)
    if (m.cluster_id != modes.front().cluster_id) throw ContractError("modes span several clusters");
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; }))
    throw ContractError("zero coefficients");
  ScalarField w(modes.front().w.grid());
  for (std::size_t i = 0; i < modes.size(); ++i) w += modes[i].w * coefficients[i];
  const double norm = integrate(w * w.conj()).real();
  if (!(norm > 0.0)) throw ContractError("superposition vanishes");
  return w * (1.0 / std::sqrt(norm));
}

double membrane_residual(const MembraneOperator& op, const ScalarField& w, double lambda) {
  require_same_grid(op.grid, w.grid(), "membrane residual");
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::VectorXd sw(n), wv(n);
  for (Eigen::Index u = 0; u < n; ++u) {
    wv[u] = w[op.nodes[u]].real();
    sw[u] = op.mass_sqrt[u] * wv[u];
  }
  const Eigen::VectorXd Bsw = op.B * sw;
  double worst = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) worst = std::max(worst, std::abs(Bsw[u] / op.mass_sqrt[u] - lambda * wv[u]));
  return worst;
}

NodalSet nodal_set(const ScalarField& w, const std::vector<bool>& active) {
  const Grid& g = w.grid();
  if (g.dim() != 2) throw ContractError("nodal sets need a 2D field");
  if (!active.empty() && active.size() != g.size()) throw ContractError("active mask size mismatch");
  require_finite(w, "nodal field");
  const double wmax = w.max_abs();
  if (wmax == 0.0) throw ContractError("degenerate field");
  const double snap = 1e-12 * wmax;
  auto value = [&](std::size_t idx) {
    const double v = w[idx].real();
    return std::abs(v) < snap ? 0.0 : v;
  };
  auto on = [&](std::size_t idx) { return active.empty() || active[idx]; };

  const int nx = g.count(0), ny = g.count(1);
  const bool px = g.boundary(0) == Boundary::periodic, py = g.boundary(1) == Boundary::periodic;
  NodalSet out;
  out.period = {px ? nx * g.spacing(0) : 0.0, py ? ny * g.spacing(1) : 0.0};

  // Vertex keys: exact zeros are keyed by their node, other crossings by their edge.
  std::map<std::pair<long, long>, int> key_to_vertex;
  std::vector<Eigen::Vector2d> verts;
  auto vertex = [&](int ia, int ja, int ib, int jb) {
    const std::size_t a = g.index(ia % nx, ja % ny), b = g.index(ib % nx, jb % ny);
    const double va = value(a), vb = value(b);
    const double t = va / (va - vb);
    std::pair<long, long> key;
    if (va == 0.0) key = {static_cast<long>(a), -1};
    else if (vb == 0.0) key = {static_cast<long>(b), -1};
    else key = {static_cast<long>(std::min(a, b)), static_cast<long>(std::max(a, b))};
    auto it = key_to_vertex.find(key);
    if (it != key_to_vertex.end()) return it->second;
    const Eigen::Vector2d pa(g.coord(0, ia), g.coord(1, ja)), pb(g.coord(0, ib), g.coord(1, jb));
    verts.push_back(va == 0.0 ? pa : vb == 0.0 ? pb : Eigen::Vector2d(pa + t * (pb - pa)));
    key_to_vertex.emplace(key, static_cast<int>(verts.size()) - 1);
    return static_cast<int>(verts.size()) - 1;
  };

  std::set<std::pair<int, int>> segments;
  const int cx = px ? nx : nx - 1, cy = py ? ny : ny - 1;
  for (int j = 0; j < cy; ++j)
    for (int i = 0; i < cx; ++i) {
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      double v[4];
      bool ok = true;
      for (int c = 0; c < 4; ++c) {
        const std::size_t idx = g.index(ci[c] % nx, cj[c] % ny);
        ok = ok && on(idx);
        v[c] = value(idx);
      }
      if (!ok) continue;
      int mask = 0;
      for (int c = 0; c < 4; ++c)
        if (v[c] < 0.0) mask |= 1 << c;
      if (mask == 0 || mask == 15) continue;
      // Edge e joins corner e and corner e+1.
      auto edge = [&](int e) { return vertex(ci[e], cj[e], ci[(e + 1) % 4], cj[(e + 1) % 4]); };
      std::vector<std::pair<int, int>> cut;
      if (mask == 5 || mask == 10) {
        const bool center_neg = (v[0] + v[1] + v[2] + v[3]) < 0.0;
        // Isolate the corners whose sign differs from the centre.
        const bool isolate_even = (mask == 5) != center_neg;
        if (isolate_even) cut = {{3, 0}, {1, 2}};
        else cut = {{0, 1}, {2, 3}};
      } else {
        std::vector<int> crossing;
        for (int e = 0; e < 4; ++e)
          if ((v[e] < 0.0) != (v[(e + 1) % 4] < 0.0)) crossing.push_back(e);
        cut = {{crossing[0], crossing[1]}};
      }
      for (const auto& [e1, e2] : cut) {
        const int a = edge(e1), b = edge(e2);
        if (a != b) segments.emplace(std::min(a, b), std::max(a, b));
      }
    }

  // Chain assembly over the vertex graph.
  std::vector<std::vector<std::pair<int, int>>> adj(verts.size());
  int sid = 0;
  for (const auto& [a, b] : segments) {
    adj[a].emplace_back(b, sid);
    adj[b].emplace_back(a, sid);
    ++sid;
  }
  std::vector<bool> used(segments.size(), false);
  auto unwrap = [&](const Eigen::Vector2d& prev, Eigen::Vector2d p) {
    for (int a = 0; a < 2; ++a)
      if (out.period[a] > 0.0) p[a] -= out.period[a] * std::round((p[a] - prev[a]) / out.period[a]);
    return p;
  };
  auto walk = [&](int start, int first_seg, int next) {
    Polyline pl;
    pl.points.push_back(verts[start]);
    used[first_seg] = true;
    int cur = next;
    while (true) {
      if (cur == start) {
        pl.closed = true;
        break;
      }
      pl.points.push_back(unwrap(pl.points.back(), verts[cur]));
      if (adj[cur].size() != 2) break;
      int step = -1;
      for (const auto& [nb, s] : adj[cur])
        if (!used[s]) {
          step = s;
          used[s] = true;
          cur = nb;
          break;
        }
      if (step < 0) break;
    }
    out.polylines.push_back(std::move(pl));
  };
  for (int v = 0; v < static_cast<int>(verts.size()); ++v)
    if (adj[v].size() != 2)
      for (const auto& [nb, s] : adj[v])
        if (!used[s]) walk(v, s, nb);
  for (int v = 0; v < static_cast<int>(verts.size()); ++v)
    for (const auto& [nb, s] : adj[v])
      if (!used[s]) walk(v, s, nb);
  return out;
}

NodalStats nodal_stats(const NodalSet& s) {
  NodalStats st;
  auto seg = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    Eigen::Vector2d d = b - a;
    for (int k = 0; k < 2; ++k)
      if (s.period[k] > 0.0) d[k] -= s.period[k] * std::round(d[k] / s.period[k]);
    return d.norm();
  };
  for (const auto& pl : s.polylines) {
    ++st.components;
    if (pl.closed) ++st.closed;
    for (std::size_t i = 1; i < pl.points.size(); ++i) st.length += seg(pl.points[i - 1], pl.points[i]);
    if (pl.closed && pl.points.size() > 1) st.length += seg(pl.points.back(), pl.points.front());
  }
  return st;
}

std::string nodal_svg(const NodalSet& s, const MembraneProblem& problem) {
  double x0 = 0, y0 = 0, w = 1, h = 1;
  switch (problem.shape) {
    case Shape::rectangle: w = problem.a, h = problem.b; break;
    case Shape::square: break;
    case Shape::disk:
    case Shape::annulus:
      x0 = y0 = -problem.radius;
      w = h = 2 * problem.radius;
      break;
    case Shape::interval: throw ContractError("nodal drawings need a 2D membrane");
  }
  const double pad = 0.05 * std::max(w, h);
  char buf[256];
  std::ostringstream os;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"%.4f %.4f %.4f %.4f\">\n", x0 - pad,
                -(y0 + h) - pad, w + 2 * pad, h + 2 * pad);
  os << buf << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"" << 0.005 * std::max(w, h) << "\">\n";
  if (problem.shape == Shape::disk || problem.shape == Shape::annulus) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"0\" cy=\"0\" r=\"%.4f\" stroke=\"black\"/>\n", problem.radius);
    os << buf;
    if (problem.shape == Shape::annulus) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"0\" cy=\"0\" r=\"%.4f\" stroke=\"black\"/>\n", problem.inner_radius);
      os << buf;
    }
  } else {
    std::snprintf(buf, sizeof buf, "<rect x=\"%.4f\" y=\"%.4f\" width=\"%.4f\" height=\"%.4f\" stroke=\"black\"/>\n",
                  x0, y0, w, h);
    os << buf;
  }
  for (const auto& pl : s.polylines) {
    os << "<path stroke=\"#b03020\" d=\"";
    for (std::size_t i = 0; i < pl.points.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.4f %.4f", i == 0 ? "M" : " L", pl.points[i].x(), pl.points[i].y());
      os << buf;
    }
    if (pl.closed) os << " Z";
    os << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

std::string nodal_csv(const NodalSet& s) {
  std::ostringstream os;
  os << "chain,closed,x,y\n";
  char buf[128];
  for (std::size_t c = 0; c < s.polylines.size(); ++c)
    for (const auto& p : s.polylines[c].points) {
      std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g\n", c, s.polylines[c].closed ? 1 : 0, p.x(), p.y());
      os << buf;
    }
  return os.str();
}

}  // namespace optiq::chladni
