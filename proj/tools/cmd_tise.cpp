#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "optiq/field_io.hpp"
#include "optiq/schrodinger_var.hpp"

namespace optiq::cli {

namespace {

using namespace optiq::tise;

double rational(const std::string& s) { return parse_rational(s).value(); }

double number(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_rational(v.get<std::string>()).value();
  throw UsageError(what + " must be a number or a rational string");
}

struct TiseArgs {
  std::string potential = R"({"kind":"box"})";
  int dim = 1;
  std::string lo = "0", hi = "1", h = "1/256";
  std::string mass = "1", hbar = "1";
  double tolerance = 1e-6;
  int max_iterations = 100000;
  std::string init = "bump";
  unsigned long seed = 1;
  std::string out = "tise.json";
  std::string log = "tise_log.csv";
  std::string psi;
};

std::function<void()> tise_cmd(CLI::App& sub) {
  auto a = std::make_shared<TiseArgs>();
  sub.add_option("--potential", a->potential, "Potential spec: JSON file or inline object");
  sub.add_option("--dim", a->dim)->check(CLI::Range(1, 3));
  sub.add_option("--lo", a->lo, "Lower wall on every axis")->check(rational_check());
  sub.add_option("--hi", a->hi, "Upper wall on every axis")->check(rational_check());
  sub.add_option("--h", a->h, "Grid spacing")->check(rational_check());
  sub.add_option("--mass", a->mass)->check(rational_check());
  sub.add_option("--hbar", a->hbar)->check(rational_check());
  sub.add_option("--tolerance", a->tolerance, "TISE residual at convergence")->check(CLI::PositiveNumber);
  sub.add_option("--max-iterations", a->max_iterations)->check(CLI::PositiveNumber);
  sub.add_option("--init", a->init, "Starting state")->check(CLI::IsMember({"bump", "random"}));
  sub.add_option("--seed", a->seed, "Seed of the random starting state");
  sub.add_option("--out", a->out, "Result JSON");
  sub.add_option("--log", a->log, "Iteration log CSV");
  sub.add_option("--psi", a->psi, "Base path for the final wavefunction field files");
  return [a] {
    const json spec = load_json(a->potential);
    require_keys(spec, {"kind", "omega", "center", "field"}, "potential spec");
    if (!spec.contains("kind") || !spec["kind"].is_string()) throw UsageError("potential spec needs a string 'kind'");
    const std::string kind = spec["kind"];
    const double m = rational(a->mass), hbar = rational(a->hbar);

    Potential pot;
    Grid g;
    if (kind == "sampled") {
      if (!spec.contains("field") || !spec["field"].is_string()) throw UsageError("sampled potential needs 'field'");
      ScalarField V;
      try {
        V = io::read_field(spec["field"].get<std::string>());
      } catch (const ContractError& e) {
        throw UsageError(std::string("cannot read potential field: ") + e.what());
      }
      g = V.grid();
      pot = Potential::sampled(V, m, hbar);
    } else {
      const double lo = rational(a->lo), hi = rational(a->hi), h = rational(a->h);
      if (!(hi > lo) || !(h > 0.0)) throw UsageError("need lo < hi and h > 0");
      const int count = static_cast<int>(std::lround((hi - lo) / h)) + 1;
      g = Grid::cube(a->dim, lo, hi, count, Boundary::clamped);
      if (kind == "box") {
        pot = Potential::free(m, hbar);
      } else if (kind == "harmonic") {
        Vec3 center = Vec3::Zero();
        if (spec.contains("center")) {
          const auto& c = spec["center"];
          if (!c.is_array() || c.size() != 3) throw UsageError("center needs three entries");
          center = Vec3(number(c[0], "center"), number(c[1], "center"), number(c[2], "center"));
        }
        pot = Potential::harmonic(spec.contains("omega") ? number(spec["omega"], "omega") : 1.0, m, hbar, center);
      } else {
        throw UsageError("potential kind must be box, harmonic or sampled");
      }
    }

    ScalarField psi0(g);
    std::mt19937_64 rng(a->seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Index3 at = g.unravel(n);
      if (g.boundary_distance(at) < 1) continue;
      if (a->init == "random") {
        psi0[n] = u(rng);
        continue;
      }
      const int idx[3] = {at.i, at.j, at.k};
      double v = 1.0;
      for (int ax = 0; ax < g.dim(); ++ax) {
        const double s = static_cast<double>(idx[ax]) / (g.count(ax) - 1);
        v *= s * (1 - s) * (1 + 0.5 * s);
      }
      psi0[n] = v;
    }

    MinimizeOptions opts;
    opts.tolerance = a->tolerance;
    opts.max_iterations = a->max_iterations;
    const auto st = minimize(pot, psi0, opts);

    std::ostringstream log;
    log << "iteration,energy,residual\n";
    for (std::size_t i = 0; i < st.energy_log.size(); ++i)
      log << i << ',' << io::format_double(st.energy_log[i]) << ',' << io::format_double(st.residual_log[i]) << '\n';
    const auto J = functional_J(st.psi, pot, st.E);
    json j{{"potential", kind},
           {"grid", io::grid_to_json(g)},
           {"E", st.E},
           {"iterations", st.iterations},
           {"converged", st.converged},
           {"tise_residual", tise_residual(st, pot)},
           {"hj_integral_identity", hj_integral_identity(st, pot)},
           {"J", J.J},
           {"norm", J.norm},
           {"log", a->log}};
    write_text(a->log, log.str());
    if (!a->psi.empty()) {
      io::write_field(output_path(a->psi), st.psi);
      j["psi"] = a->psi;
    }
    write_json(a->out, j);
  };
}

}  // namespace

void add_tise(std::vector<CommandSpec>& out) {
  out.push_back({"tise", "Variational ground state of the time-independent Schrodinger equation", tise_cmd});
}

}  // namespace optiq::cli
