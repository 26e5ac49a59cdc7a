#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "cli.hpp"
#include "optiq/chladni_modes.hpp"
#include "optiq/field_io.hpp"

namespace optiq::cli {

namespace {

using namespace optiq::chladni;
using std::numbers::pi;

struct MembraneArgs {
  std::string domain = "square";
  std::string bc = "dirichlet";
  std::string a = "1", b = "1", radius = "1", inner = "0";
  std::string h = "1/64";
  bool periodic = false;
  int max_iterations = 1000;
};

void add_membrane_options(CLI::App& sub, MembraneArgs& m) {
  sub.add_option("--domain", m.domain)->check(CLI::IsMember({"interval", "rectangle", "square", "disk", "annulus"}));
  sub.add_option("--bc", m.bc)->check(CLI::IsMember({"dirichlet", "neumann"}));
  sub.add_option("--a", m.a, "Interval length or rectangle width")->check(rational_check());
  sub.add_option("--b", m.b, "Rectangle height")->check(rational_check());
  sub.add_option("--radius", m.radius, "Disk or annulus outer radius")->check(rational_check());
  sub.add_option("--inner", m.inner, "Annulus inner radius")->check(rational_check());
  sub.add_option("--h", m.h, "Grid spacing")->check(rational_check());
  sub.add_flag("--periodic", m.periodic, "Periodic rectangle (a torus)");
  sub.add_option("--max-iterations", m.max_iterations, "Sparse eigensolver iteration cap")
      ->check(CLI::PositiveNumber);
}

MembraneProblem problem_of(const MembraneArgs& m) {
  static const std::map<std::string, Shape> shapes{{"interval", Shape::interval},   {"rectangle", Shape::rectangle},
                                                   {"square", Shape::square},       {"disk", Shape::disk},
                                                   {"annulus", Shape::annulus}};
  MembraneProblem p;
  p.shape = shapes.at(m.domain);
  p.bc = m.bc == "neumann" ? MembraneBC::neumann : MembraneBC::dirichlet;
  p.a = parse_rational(m.a).value();
  p.b = parse_rational(m.b).value();
  p.radius = parse_rational(m.radius).value();
  p.inner_radius = parse_rational(m.inner).value();
  p.h = parse_rational(m.h).value();
  p.periodic = m.periodic;
  return p;
}

json problem_json(const MembraneArgs& m) {
  return {{"domain", m.domain}, {"bc", m.bc}, {"h", parse_rational(m.h).text()}, {"periodic", m.periodic}};
}

struct ModesArgs {
  MembraneArgs membrane;
  int count = 6;
  std::string out = "modes.json";
  std::string fields;
};

std::function<void()> modes_cmd(CLI::App& sub) {
  auto a = std::make_shared<ModesArgs>();
  add_membrane_options(sub, a->membrane);
  sub.add_option("--count", a->count, "Number of lowest modes")->check(CLI::Range(1, 200));
  sub.add_option("--out", a->out, "Eigenvalue table JSON");
  sub.add_option("--fields", a->fields, "Write mode i to <prefix>.<i>.json/.csv");
  return [a] {
    const auto op = assemble(problem_of(a->membrane));
    SolveOptions opts;
    opts.max_iterations = a->membrane.max_iterations;
    const auto modes = solve_modes(op, a->count, opts);
    json list = json::array();
    for (std::size_t i = 0; i < modes.size(); ++i) {
      list.push_back({{"index", i},
                      {"lambda", modes[i].lambda},
                      {"cluster_id", modes[i].cluster_id},
                      {"multiplicity", modes[i].multiplicity},
                      {"residual", modes[i].residual}});
      if (!a->fields.empty()) io::write_field(output_path(a->fields + "." + std::to_string(i)), modes[i].w);
    }
    json j = problem_json(a->membrane);
    j["unknowns"] = op.size();
    j["count"] = a->count;
    j["modes"] = list;
    write_json(a->out, j);
  };
}

struct ChladniArgs {
  MembraneArgs membrane;
  int mode = 1;
  int count = 8;
  std::vector<std::string> sines;
  std::string out = "chladni.json";
  std::string csv = "chladni.csv";
  std::string svg = "chladni.svg";
};

// sum of c sin(m pi x / a) sin(n pi y / b) from "m:n:c" terms.
ScalarField sine_target(const Grid& g, const MembraneProblem& p, const std::vector<std::string>& terms) {
  if (p.shape != Shape::square && p.shape != Shape::rectangle)
    throw UsageError("--sines needs a square or rectangle domain");
  struct Term {
    int m, n;
    double c;
  };
  std::vector<Term> list;
  for (const auto& t : terms) {
    const auto c1 = t.find(':'), c2 = t.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw UsageError("sine term must be m:n:c, got '" + t + "'");
    try {
      list.push_back({std::stoi(t.substr(0, c1)), std::stoi(t.substr(c1 + 1, c2 - c1 - 1)),
                      parse_rational(t.substr(c2 + 1)).value()});
    } catch (const std::logic_error&) {
      throw UsageError("sine term must be m:n:c, got '" + t + "'");
    }
  }
  const double w = p.shape == Shape::square ? 1.0 : p.a, h = p.shape == Shape::square ? 1.0 : p.b;
  return ScalarField::sample(g, [&](const Vec3& x) {
    double s = 0.0;
    for (const auto& t : list) s += t.c * std::sin(t.m * pi * x.x() / w) * std::sin(t.n * pi * x.y() / h);
    return s;
  });
}

std::function<void()> chladni_cmd(CLI::App& sub) {
  auto a = std::make_shared<ChladniArgs>();
  add_membrane_options(sub, a->membrane);
  sub.add_option("--mode", a->mode, "Mode index (0 = ground) when no --sines are given")->check(CLI::NonNegativeNumber);
  sub.add_option("--count", a->count, "Modes to compute")->check(CLI::Range(1, 200));
  sub.add_option("--sines", a->sines, "Target m:n:c terms projected onto one eigenvalue cluster");
  sub.add_option("--out", a->out, "Summary JSON");
  sub.add_option("--csv", a->csv, "Nodal polylines CSV");
  sub.add_option("--svg", a->svg, "Nodal polylines SVG");
  return [a] {
    const auto problem = problem_of(a->membrane);
    if (problem.shape == Shape::interval) throw UsageError("nodal lines need a two-dimensional domain");
    const auto op = assemble(problem);
    SolveOptions opts;
    opts.max_iterations = a->membrane.max_iterations;
    const int count = std::max(a->count, a->mode + 1);
    const auto modes = solve_modes(op, count, opts);
    ScalarField w;
    double lambda = 0.0;
    int cluster = 0;
    json coefficients = json::array();
    if (a->sines.empty()) {
      w = modes[a->mode].w;
      lambda = modes[a->mode].lambda;
      cluster = modes[a->mode].cluster_id;
    } else {
      const auto target = sine_target(op.grid, problem, a->sines);
      const auto c = project_coefficients(modes, target);
      double total = 0.0;
      std::map<int, double> weight;
      for (std::size_t i = 0; i < modes.size(); ++i) {
        weight[modes[i].cluster_id] += c[i] * c[i];
        total += c[i] * c[i];
      }
      if (!(total > 0.0)) throw ContractError("target is orthogonal to the computed modes");
      int hits = 0;
      for (const auto& [id, wt] : weight)
        if (wt > 1e-6 * total) {
          ++hits;
          cluster = id;
        }
      if (hits != 1) throw ContractError("modes span several clusters");
      const auto members = cluster_members(modes, cluster);
      const auto cc = project_coefficients(members, target);
      w = superpose(members, cc);
      lambda = members.front().lambda;
      for (double x : cc) coefficients.push_back(x);
    }
    const auto set = nodal_set(w, op.active_mask());
    const auto st = nodal_stats(set);
    json j = problem_json(a->membrane);
    j["lambda"] = lambda;
    j["cluster_id"] = cluster;
    if (a->sines.empty())
      j["mode"] = a->mode;
    else
      j["coefficients"] = coefficients;
    j["residual"] = membrane_residual(op, w, lambda) / std::max(lambda, 1.0);
    j["nodal"] = {{"components", st.components}, {"closed", st.closed}, {"length", st.length}};
    j["csv"] = a->csv;
    j["svg"] = a->svg;
    write_text(a->csv, nodal_csv(set));
    write_text(a->svg, nodal_svg(set, problem));
    write_json(a->out, j);
  };
}

}  // namespace

void add_membrane(std::vector<CommandSpec>& out) {
  out.push_back({"modes", "Lowest membrane eigenvalues with multiplicity clusters", modes_cmd});
  out.push_back({"chladni", "Nodal lines of a membrane mode as CSV and SVG", chladni_cmd});
}

}  // namespace optiq::cli
