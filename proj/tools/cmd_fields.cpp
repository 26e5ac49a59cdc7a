#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "optiq/eikonal_rays.hpp"
#include "optiq/field_io.hpp"
#include "optiq/huygens_equiv.hpp"
#include "optiq/maxwell_rs.hpp"
#include "optiq/scalar_field.hpp"

namespace optiq::cli {

namespace {

using std::numbers::pi;

double rational(const std::string& s) { return parse_rational(s).value(); }

// JSON number or exact rational string.
double number(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_rational(v.get<std::string>()).value();
  throw UsageError(what + " must be a number or a rational string");
}

Vec3 vec3(const std::vector<std::string>& v) {
  return {rational(v[0]), rational(v[1]), rational(v[2])};
}

json op_json(const huygens::WaveOperator& op) {
  json a1x = json::array();
  for (const auto& c : op.a1x) a1x.push_back(complex_json(c));
  return {{"a2t", complex_json(op.a2t)},
          {"a1t", complex_json(op.a1t)},
          {"alap", complex_json(op.alap)},
          {"a1x", a1x},
          {"a0", complex_json(op.a0)}};
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

struct PhotonArgs {
  int n = 32;
  std::string length = "1";
  int cycles = 1;
  int helicity = 1;
  std::string courant = "1/4";
  int steps = 100;
  int stencil = 2;
  std::string out = "photon.json";
  std::string field;
};

std::function<void()> photon(CLI::App& sub) {
  auto a = std::make_shared<PhotonArgs>();
  sub.add_option("--n", a->n, "Nodes per axis of the periodic cube")->check(CLI::Range(4, 256));
  sub.add_option("--length", a->length, "Cube side")->check(rational_check());
  sub.add_option("--cycles", a->cycles, "Wavelengths across the cube along z")->check(CLI::Range(1, 64));
  sub.add_option("--helicity", a->helicity)->check(CLI::IsMember({-1, 1}));
  sub.add_option("--courant", a->courant, "dt = courant * h / c")->check(rational_check());
  sub.add_option("--steps", a->steps)->check(CLI::NonNegativeNumber);
  sub.add_option("--stencil", a->stencil, "Curl stencil order")->check(CLI::IsMember({2, 4}));
  sub.add_option("--out", a->out, "Report JSON");
  sub.add_option("--field", a->field, "Base path for the final F field files");
  return [a] {
    const double L = rational(a->length);
    const Grid g = Grid::cube(3, 0.0, L, a->n, Boundary::periodic);
    const double k = 2 * pi * a->cycles / L;
    const double dt = rational(a->courant) * g.min_spacing();
    const auto f0 = photon::circular_plane_wave(g, k, a->helicity);
    photon::EvolveOptions opts;
    opts.stencil = a->stencil == 4 ? photon::CurlStencil::fourth_order : photon::CurlStencil::second_order;
    const auto f1 = photon::evolve(f0, dt, a->steps, opts);
    const double e0 = photon::total_energy(f0), e1 = photon::total_energy(f1);
    const auto exact = photon::circular_plane_wave(g, k, a->helicity, a->steps * dt);
    const Complex overlap = integrate(hdot(exact.F, f1.F));
    json j{{"grid", io::grid_to_json(g)},
           {"helicity", a->helicity},
           {"k", k},
           {"dt", dt},
           {"steps", a->steps},
           {"stencil", a->stencil},
           {"energy_initial", e0},
           {"energy_final", e1},
           {"energy_drift", std::abs(e1 - e0) / e0},
           {"divergence_initial", divergence(f0.F).max_abs()},
           {"divergence_final", divergence(f1.F).max_abs()},
           {"phase_error", std::abs(std::arg(overlap))},
           {"probability_norm", photon::probability_norm(photon::photon_normalize(f1))}};
    if (!a->field.empty()) {
      io::write_vector_field(output_path(a->field), f1.F);
      j["field"] = a->field;
    }
    write_json(a->out, j);
  };
}

struct ScalarArgs {
  std::string wave = "travelling";
  int n = 64;
  std::string omega;
  std::string mass = "0";
  std::string c = "1";
  std::string hbar = "1";
  std::string dt;
  int snapshots = 8;
  std::string series;
  std::string write_series;
  std::string out = "scalar.json";
};

std::vector<scalar::ScalarState> scalar_series(const ScalarArgs& a, double& dt, double& omega) {
  const double m = rational(a.mass), c = rational(a.c), hbar = rational(a.hbar);
  // On-shell for the fundamental sine mode of the unit square unless given.
  omega = a.omega.empty() ? c * std::sqrt(2 * pi * pi + m * m) : rational(a.omega);
  std::vector<scalar::ScalarState> out;
  if (!a.series.empty()) {
    if (a.dt.empty()) throw UsageError("--series needs --dt");
    dt = rational(a.dt);
    for (int i = 0; i < a.snapshots; ++i) {
      const std::string base = a.series + "." + std::to_string(i);
      try {
        out.push_back({io::read_field(base + ".V"), io::read_field(base + ".Vdot"), c, m, hbar});
      } catch (const ContractError& e) {
        throw UsageError(std::string("cannot read snapshot: ") + e.what());
      }
    }
    return out;
  }
  if (a.wave == "travelling") {
    const Grid g = Grid::cube(1, 0.0, 1.0, a.n, Boundary::periodic);
    dt = a.dt.empty() ? 0.25 / a.n : rational(a.dt);
    const double k1 = 2 * pi, k2 = 4 * pi;
    const double w1 = c * std::sqrt(k1 * k1 + m * m), w2 = c * std::sqrt(k2 * k2 + m * m);
    for (int i = 0; i < a.snapshots; ++i) {
      const double t = i * dt;
      auto e1 = [&](const Vec3& x) { return std::exp(Complex(0, k1 * x.x() - w1 * t)); };
      auto e2 = [&](const Vec3& x) { return 0.3 * std::exp(Complex(0, k2 * x.x() - w2 * t)); };
      const auto V = ScalarField::sample(g, [&](const Vec3& x) { return e1(x) + e2(x); });
      const auto Vt = ScalarField::sample(g, [&](const Vec3& x) { return Complex(0, -w1) * e1(x) + Complex(0, -w2) * e2(x); });
      out.push_back({V, Vt, c, m, hbar});
    }
    return out;
  }
  const Grid g = Grid::cube(2, 0.0, 1.0, a.n, Boundary::clamped);
  dt = a.dt.empty() ? 0.25 / a.n : rational(a.dt);
  const auto psi = ScalarField::sample(g, [](const Vec3& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); });
  for (int i = 0; i < a.snapshots; ++i) {
    const Complex phase = std::exp(Complex(0, -omega * i * dt));
    out.push_back({psi * phase, psi * (phase * Complex(0, -omega)), c, m, hbar});
  }
  return out;
}

std::function<void()> scalar_cmd(CLI::App& sub) {
  auto a = std::make_shared<ScalarArgs>();
  sub.add_option("--wave", a->wave, "Built-in series")->check(CLI::IsMember({"travelling", "stationary"}));
  sub.add_option("--n", a->n, "Nodes per axis")->check(CLI::Range(5, 4096));
  sub.add_option("--omega", a->omega, "Frequency of the stationary state (default: on shell)")->check(rational_check());
  sub.add_option("--mass", a->mass)->check(rational_check());
  sub.add_option("--c", a->c)->check(rational_check());
  sub.add_option("--hbar", a->hbar)->check(rational_check());
  sub.add_option("--dt", a->dt, "Snapshot spacing")->check(rational_check());
  sub.add_option("--snapshots", a->snapshots)->check(CLI::Range(1, 1000));
  sub.add_option("--series", a->series, "Read snapshots <prefix>.<i>.V and <prefix>.<i>.Vdot instead");
  sub.add_option("--write-series", a->write_series, "Write the snapshots under this prefix");
  sub.add_option("--out", a->out, "Report JSON");
  return [a] {
    double dt = 0.0, omega = 0.0;
    const auto series = scalar_series(*a, dt, omega);
    for (const auto& s : series) scalar::validate(s);
    const bool normalized = series.front().m > 0.0;
    json snaps = json::array();
    for (const auto& s : series)
      snaps.push_back({{"energy", integrate(scalar::scalar_energy_density(s)).real()},
                       {"charge", scalar::total_charge(scalar::kg_current(s, normalized).J0)}});
    const auto se = scalar::stress_energy(series.front());
    json j{{"grid", io::grid_to_json(series.front().V.grid())},
           {"dt", dt},
           {"snapshots", snaps},
           {"normalized_current", normalized},
           {"T00_max", se.T00.max_abs()},
           {"T0i_max", se.T0i.max_abs()}};
    if (series.size() >= 3) {
      j["continuity_residual"] = scalar::continuity_residual_scalar(series, dt);
      j["dalembert_residual"] = scalar::dalembert_residual(series, dt);
    }
    if (a->series.empty() && a->wave == "stationary") {
      const auto& s = series.front();
      const auto red = scalar::helmholtz_reduce(s, omega);
      j["helmholtz_residual"] = scalar::helmholtz_residual(red.ansatz.psi, red.m_tilde_sq);
      j["m_tilde_sq"] = red.m_tilde_sq;
      if (normalized) {
        const auto J0 = scalar::kg_current(s, true).J0;
        double dev = 0.0;
        for (std::size_t n = 0; n < J0.size(); ++n)
          dev = std::max(dev, std::abs(J0[n] - s.hbar * omega / s.m * s.V[n] * s.V[n]));
        j["J0_stationary_gap"] = dev;
      }
    }
    if (!a->write_series.empty())
      for (std::size_t i = 0; i < series.size(); ++i) {
        const std::string base = a->write_series + "." + std::to_string(i);
        io::write_field(output_path(base + ".V"), series[i].V);
        io::write_field(output_path(base + ".Vdot"), series[i].Vdot);
      }
    write_json(a->out, j);
  };
}

struct RaysArgs {
  std::string medium = R"({"kind":"constant","n":1})";
  std::string launch = "point";
  std::vector<std::string> source{"0", "0", "0"};
  std::vector<std::string> x0{"3/5", "0", "4/5"};
  std::vector<std::string> dir{"0", "0", "1"};
  std::string tau0 = "1", tau1 = "10", dtau = "1/100", delta = "1/10000", amplitude = "1";
  std::string csv = "rays.csv";
  std::string out = "rays.json";
};

rays::MediumIndex medium_from(const json& spec) {
  require_keys(spec, {"kind", "n", "n0", "a", "field", "floor", "lo", "hi"}, "medium spec");
  if (!spec.contains("kind") || !spec["kind"].is_string()) throw UsageError("medium spec needs a string 'kind'");
  const std::string kind = spec["kind"];
  const double floor = spec.contains("floor") ? number(spec["floor"], "floor") : 1e-6;
  rays::MediumIndex m;
  if (kind == "constant") {
    m = rays::MediumIndex::constant(spec.contains("n") ? number(spec["n"], "n") : 1.0, floor);
  } else if (kind == "linear") {
    m = rays::MediumIndex::linear(spec.contains("a") ? number(spec["a"], "a") : 0.0,
                                  spec.contains("n0") ? number(spec["n0"], "n0") : 1.0, floor);
  } else if (kind == "sampled") {
    if (!spec.contains("field") || !spec["field"].is_string()) throw UsageError("sampled medium needs 'field'");
    ScalarField n;
    try {
      n = io::read_field(spec["field"].get<std::string>());
    } catch (const ContractError& e) {
      throw UsageError(std::string("cannot read medium field: ") + e.what());
    }
    m = rays::MediumIndex::sampled(n, floor);
  } else {
    throw UsageError("medium kind must be constant, linear or sampled");
  }
  if (spec.contains("lo") != spec.contains("hi")) throw UsageError("medium domain needs both 'lo' and 'hi'");
  if (spec.contains("lo")) {
    auto corner = [](const json& v) {
      if (!v.is_array() || v.size() != 3) throw UsageError("medium domain corners need three entries");
      return Vec3(number(v[0], "lo/hi"), number(v[1], "lo/hi"), number(v[2], "lo/hi"));
    };
    m.with_domain(corner(spec["lo"]), corner(spec["hi"]));
  }
  return m;
}

std::function<void()> rays_cmd(CLI::App& sub) {
  auto a = std::make_shared<RaysArgs>();
  sub.add_option("--medium", a->medium, "Medium spec: JSON file or inline object");
  sub.add_option("--launch", a->launch)->check(CLI::IsMember({"point", "plane"}));
  sub.add_option("--source", a->source, "Point source position")->expected(3)->check(rational_check());
  sub.add_option("--x0", a->x0, "Launch point of the central ray")->expected(3)->check(rational_check());
  sub.add_option("--dir", a->dir, "Plane-wave direction")->expected(3)->check(rational_check());
  sub.add_option("--tau0", a->tau0)->check(rational_check());
  sub.add_option("--tau1", a->tau1)->check(rational_check());
  sub.add_option("--dtau", a->dtau)->check(rational_check());
  sub.add_option("--delta", a->delta, "Launch offset of the neighbour rays")->check(rational_check());
  sub.add_option("--amplitude", a->amplitude, "Launch amplitude v0")->check(rational_check());
  sub.add_option("--csv", a->csv, "Ray samples CSV");
  sub.add_option("--out", a->out, "Report JSON");
  return [a] {
    const auto medium = medium_from(load_json(a->medium));
    const Vec3 x0 = vec3(a->x0);
    const auto bundle = a->launch == "point" ? rays::point_source_bundle(vec3(a->source), x0)
                                             : rays::plane_bundle(x0, vec3(a->dir));
    const double tau0 = rational(a->tau0), v0 = rational(a->amplitude);
    const auto path = rays::ray_jacobian(bundle, medium, tau0, rational(a->tau1), rational(a->dtau),
                                         rational(a->delta));
    const auto amp = rays::transport_amplitude(path, v0);
    std::ostringstream csv;
    csv << "tau,x,y,z,phi,J,amplitude\n";
    int caustics = 0;
    json first_caustic = nullptr;
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
      const auto& s = path.samples[i];
      if (s.caustic) {
        if (caustics == 0) first_caustic = s.tau;
        ++caustics;
      }
      csv << io::format_double(s.tau) << ',' << io::format_double(s.x.x()) << ',' << io::format_double(s.x.y())
          << ',' << io::format_double(s.x.z()) << ',' << io::format_double(s.phi) << ','
          << io::format_double(s.J) << ',' << io::format_double(amp.via_jacobian[i]) << '\n';
    }
    const auto& last = path.samples.back();
    json j{{"launch", a->launch},
           {"samples", path.samples.size()},
           {"exited", path.exited},
           {"caustics", caustics},
           {"first_caustic_tau", first_caustic},
           {"amplitude_route_gap", amp.max_relative_gap},
           {"final", {{"tau", last.tau}, {"x", vec_json(last.x)}, {"phi", last.phi}, {"J", last.J},
                      {"amplitude_jacobian", std::isfinite(amp.via_jacobian.back()) ? json(amp.via_jacobian.back()) : json(nullptr)},
                      {"amplitude_laplacian", amp.via_laplacian.back()}}},
           {"csv", a->csv}};
    write_text(a->csv, csv.str());
    write_json(a->out, j);
  };
}

struct HuygensArgs {
  std::string a = "1";
  std::string m = "1";
  std::string alpha = "4/5";
  unsigned long seed = 17;
  int count = 5;
  int n = 32;
  std::string out = "huygens.json";
};

std::function<void()> huygens_cmd(CLI::App& sub) {
  auto a = std::make_shared<HuygensArgs>();
  sub.add_option("--a", a->a, "Telegrapher damping")->check(rational_check());
  sub.add_option("--m", a->m, "Klein-Gordon mass")->check(rational_check());
  sub.add_option("--alpha", a->alpha, "Rate of the exp(alpha t) gauge in the residual check")->check(rational_check());
  sub.add_option("--seed", a->seed, "Seed of the random test functions");
  sub.add_option("--count", a->count, "Number of test functions")->check(CLI::Range(1, 100));
  sub.add_option("--n", a->n, "Coarse grid nodes per axis; residuals also run at 2n")->check(CLI::Range(8, 512));
  sub.add_option("--out", a->out, "Report JSON, or - for stdout");
  return [a] {
    using namespace huygens;
    const auto chain = build_telegrapher(rational(a->a));
    const auto kg = telegrapher_to_kg(rational(a->m));
    const auto fns = random_test_functions(a->count, a->seed);
    const auto temporal_gauge = GaugeFactor::temporal(rational(a->alpha));
    const auto spatial_gauge = GaugeFactor::spatial({Complex(0, rational(a->a)), 0.0, 0.0});
    auto periodic = [](int n) {
      return Grid::box(2, {0, 0, 0}, {1, 1, 0}, {n, n, 1},
                       {Boundary::periodic, Boundary::periodic, Boundary::periodic});
    };
    auto residual = [&](const GaugeFactor& g, const Grid& grid, int n) {
      return equivalence_residual(dalembert(), conjugate_operator(dalembert(), g), g, fns, grid, 0.0, 1.0 / n, 5);
    };
    const int n = a->n;
    const double t1 = residual(temporal_gauge, periodic(n), n), t2 = residual(temporal_gauge, periodic(2 * n), 2 * n);
    const double s1 = residual(spatial_gauge, Grid::cube(2, 0.0, 1.0, n + 1, Boundary::clamped), n);
    const double s2 = residual(spatial_gauge, Grid::cube(2, 0.0, 1.0, 2 * n + 1, Boundary::clamped), 2 * n);
    json j{{"telegrapher_chain",
            {{"a", chain.a},
             {"b", chain.b},
             {"c", chain.c},
             {"dalembert", op_json(chain.dalembert)},
             {"temporal", op_json(chain.temporal)},
             {"first_spatial", op_json(chain.first_spatial)},
             {"second_spatial", op_json(chain.second_spatial)},
             {"target", op_json(chain.telegrapher)},
             {"reached", chain.reached},
             {"constant_gap", complex_json(chain.constant_gap)}}},
           {"klein_gordon_chain",
            {{"m", kg.m},
             {"telegrapher", op_json(kg.telegrapher)},
             {"substituted", op_json(kg.substituted)},
             {"klein_gordon", op_json(kg.klein_gordon)}}},
           {"residuals",
            {{"seed", a->seed},
             {"test_functions", a->count},
             {"temporal", {{"n", n}, {"coarse", t1}, {"fine", t2}, {"order", order(t1, t2)}}},
             {"spatial", {{"n", n}, {"coarse", s1}, {"fine", s2}, {"order", order(s1, s2)}}}}}};
    write_json(a->out, j);
  };
}

}  // namespace

void add_photon(std::vector<CommandSpec>& out) {
  out.push_back({"photon", "Evolve a circularly polarized plane wave and report invariants", photon});
}

void add_scalar(std::vector<CommandSpec>& out) {
  out.push_back({"scalar", "Observables and residuals of a scalar-field snapshot series", scalar_cmd});
}

void add_rays(std::vector<CommandSpec>& out) {
  out.push_back({"rays", "Trace a ray bundle and its transport amplitude", rays_cmd});
}

void add_huygens(std::vector<CommandSpec>& out) {
  out.push_back({"huygens", "Coefficient tables of the operator chain and equivalence residuals", huygens_cmd});
}

}  // namespace optiq::cli
