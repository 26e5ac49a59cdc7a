#include <cmath>
#include <memory>

#include "cli.hpp"
#include "optiq/ck_knots.hpp"
#include "optiq/field_io.hpp"

namespace optiq::cli {

namespace {

using namespace optiq::ck;

double rational(const std::string& s) { return parse_rational(s).value(); }

double max_abs(const ScalarField& f) { return f.max_abs(); }

struct CkArgs {
  std::string k = "1";
  int m = 1;
  std::string kz = "0";
  int n = 33;
  std::string half_width = "1";
  std::string half_height = "1";
  std::string out = "ck.json";
  std::string csv;
  std::string field;
};

std::function<void()> ck_cmd(CLI::App& sub) {
  auto a = std::make_shared<CkArgs>();
  sub.add_option("--k", a->k, "Wavenumber (curl F = k F)")->check(rational_check());
  sub.add_option("--m", a->m, "Azimuthal order")->check(CLI::Range(-8, 8));
  sub.add_option("--kz", a->kz, "Axial wavenumber")->check(rational_check());
  sub.add_option("--n", a->n, "Nodes across x and y")->check(CLI::Range(9, 257));
  sub.add_option("--half-width", a->half_width, "Box is [-w, w] in x and y")->check(rational_check());
  sub.add_option("--half-height", a->half_height, "Box is [-d, d] in z")->check(rational_check());
  sub.add_option("--out", a->out, "Residual report JSON");
  sub.add_option("--csv", a->csv, "Nodal intersection curves CSV");
  sub.add_option("--field", a->field, "Base path for the F field files");
  return [a] {
    const double hx = rational(a->half_width), hz = rational(a->half_height);
    const int nz = static_cast<int>(std::lround(hz / hx * (a->n - 1))) + 1;
    const Grid g = Grid::box(3, {-hx, -hx, -hz}, {hx, hx, hz}, {a->n, a->n, std::max(nz, 3)},
                             {Boundary::clamped, Boundary::clamped, Boundary::clamped});
    const auto f = ck_build_cylinder(g, rational(a->k), a->m, rational(a->kz));
    const auto nulls = null_check(f);
    json j{{"grid", io::grid_to_json(g)},
           {"k", f.k},
           {"m", f.m},
           {"kz", f.kz},
           {"gamma", f.gamma},
           {"force_free_residual", force_free_residual(f)},
           {"divergence_residual", divergence_residual(f)},
           {"vector_helmholtz_residual", vector_helmholtz_residual(f)},
           {"null", {{"d1_max", max_abs(nulls.d1)}, {"d2_max", max_abs(nulls.d2)}}}};
    const auto pair = radial_scalar(f);
    const auto rep = nodal_intersection(pair);
    double radial = 0.0;
    std::size_t points = 0;
    for (const auto& c : rep.curves)
      for (const auto& p : c.points) {
        radial = std::max(radial, std::hypot(p.x(), p.y()));
        ++points;
      }
    j["radial_scalar"] = {{"u1_helmholtz_residual", helmholtz_residual(pair.u1, pair.k2)},
                          {"u2_helmholtz_residual", helmholtz_residual(pair.u2, pair.k2)}};
    j["nodal"] = {{"curves", rep.curves.size()},
                  {"points", points},
                  {"skipped", rep.skipped.size()},
                  {"max_axis_distance", points ? json(radial) : json(nullptr)}};
    if (!a->csv.empty()) {
      write_text(a->csv, curves_csv(rep.curves));
      j["csv"] = a->csv;
    }
    if (!a->field.empty()) {
      io::write_vector_field(output_path(a->field), f.F);
      j["field"] = a->field;
    }
    write_json(a->out, j);
  };
}

struct KnotsArgs {
  std::string slope = "3/2";
  std::string major = "1";
  std::vector<std::string> tubes{"2/5"};
  int n = 103;
  std::string length = "60";
  std::string out = "knots.json";
  std::string csv;
};

std::function<void()> knots_cmd(CLI::App& sub) {
  auto a = std::make_shared<KnotsArgs>();
  sub.add_option("--slope", a->slope, "Poloidal turns per toroidal turn, as p/q")->check(rational_check());
  sub.add_option("--major", a->major, "Core circle radius")->check(rational_check());
  sub.add_option("--tubes", a->tubes, "Start radius of each traced line around the core")->check(rational_check());
  sub.add_option("--n", a->n, "Nodes across x and y")->check(CLI::Range(17, 257));
  sub.add_option("--length", a->length, "Maximum arc length per line")->check(rational_check());
  sub.add_option("--out", a->out, "Invariants JSON");
  sub.add_option("--csv", a->csv, "Traced curves CSV");
  return [a] {
    const Rational slope = parse_rational(a->slope);
    const double R = rational(a->major);
    if (!(R > 0.0)) throw UsageError("--major must be positive");
    const int nz = static_cast<int>(std::lround(0.6 / 1.6 * (a->n - 1))) + 1;
    const Grid g = Grid::box(3, {-1.6 * R, -1.6 * R, -0.6 * R}, {1.6 * R, 1.6 * R, 0.6 * R}, {a->n, a->n, nz},
                             {Boundary::clamped, Boundary::clamped, Boundary::clamped});
    const auto field = torus_field(g, slope.value(), R);
    const Torus torus{Vec3::Zero(), Vec3::UnitZ(), R, 0.6 * R};
    std::vector<Curve3D> curves;
    json list = json::array();
    for (const auto& t : a->tubes) {
      const double r = rational(t);
      if (!(r > 0.0 && r < 0.6)) throw UsageError("tube radii must lie in (0, 0.6)");
      const auto c = trace_field_line(field, Vec3(R * (1.0 + r), 0.0, 0.0), rational(a->length));
      const auto raw = torus_angles(c, torus);
      json e{{"tube", t}, {"closed", c.closed}, {"points", c.points.size()}, {"length", c.length()},
             {"raw_p", raw.raw_p}, {"raw_q", raw.raw_q}, {"p", nullptr}, {"q", nullptr}};
      if (c.closed) {
        const auto w = torus_winding(c, torus);
        e["p"] = w.p;
        e["q"] = w.q;
      }
      list.push_back(e);
      curves.push_back(c);
    }
    json links = json::array();
    for (std::size_t i = 0; i < curves.size(); ++i)
      for (std::size_t k = i + 1; k < curves.size(); ++k) {
        if (!curves[i].closed || !curves[k].closed) continue;
        const auto lk = linking_number(curves[i], curves[k]);
        links.push_back({{"pair", {i, k}}, {"raw", lk.raw}, {"linking", lk.linking}, {"gap", lk.gap},
                         {"reliable", lk.reliable}});
      }
    json j{{"slope", slope.text()},
           {"closed", list[0]["closed"]},
           {"p", list[0]["p"]},
           {"q", list[0]["q"]},
           {"curves", list},
           {"links", links}};
    if (!a->csv.empty()) {
      write_text(a->csv, curves_csv(curves));
      j["csv"] = a->csv;
    }
    write_json(a->out, j);
  };
}

}  // namespace

void add_knots(std::vector<CommandSpec>& out) {
  out.push_back({"ck", "Build a Chandrasekhar-Kendall cylinder field and report its residuals", ck_cmd});
  out.push_back({"knots", "Trace torus field lines and report winding and linking", knots_cmd});
}

}  // namespace optiq::cli
