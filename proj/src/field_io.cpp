#include "optiq/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace optiq::io {

namespace {

const char* boundary_name(Boundary b) { return b == Boundary::periodic ? "periodic" : "clamped"; }

Boundary boundary_from(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "clamped") return Boundary::clamped;
  throw ContractError("unknown boundary kind '" + s + "'");
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const std::string& suffix) {
  return std::filesystem::path(base.string() + suffix);
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ContractError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw ContractError("cannot write " + p.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  double x = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ContractError("malformed number '" + std::string(text) + "'");
  return x;
}

nlohmann::json grid_to_json(const Grid& g) {
  nlohmann::json axes = nlohmann::json::array();
  for (int a = 0; a < g.dim(); ++a) {
    axes.push_back({{"origin", g.origin(a)},
                    {"spacing", g.spacing(a)},
                    {"count", g.count(a)},
                    {"boundary", boundary_name(g.boundary(a))}});
  }
  return {{"dim", g.dim()}, {"axes", axes}};
}

Grid grid_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const auto& axes = j.at("axes");
  if (!axes.is_array() || static_cast<int>(axes.size()) != dim)
    throw ContractError("grid header: axes length must equal dim");
  std::array<double, 3> origin{0, 0, 0}, spacing{1, 1, 1};
  std::array<int, 3> counts{1, 1, 1};
  std::array<Boundary, 3> bc{Boundary::clamped, Boundary::clamped, Boundary::clamped};
  for (int a = 0; a < dim; ++a) {
    origin[a] = axes[a].at("origin").get<double>();
    spacing[a] = axes[a].at("spacing").get<double>();
    counts[a] = axes[a].at("count").get<int>();
    bc[a] = boundary_from(axes[a].at("boundary").get<std::string>());
  }
  return Grid(dim, origin, spacing, counts, bc);
}

void write_csv(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid();
  os << "i,j,k,re,im\n";
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Index3 at = g.unravel(n);
    os << at.i << ',' << at.j << ',' << at.k << ',' << format_double(f[n].real()) << ','
       << format_double(f[n].imag()) << '\n';
  }
}

ScalarField read_csv(std::istream& is, const Grid& grid) {
  ScalarField f(grid);
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  if (!std::getline(is, line) || line != "i,j,k,re,im") throw ContractError("field CSV: bad header");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::string cell[5];
    std::istringstream ls(line);
    for (auto& c : cell)
      if (!std::getline(ls, c, ',')) throw ContractError("field CSV: short row '" + line + "'");
    const int i = std::stoi(cell[0]), j = std::stoi(cell[1]), k = std::stoi(cell[2]);
    if (i < 0 || j < 0 || k < 0 || i >= grid.count(0) || j >= grid.count(1) || k >= grid.count(2))
      throw ContractError("field CSV: index out of range in '" + line + "'");
    const std::size_t n = grid.index(i, j, k);
    if (seen[n]) throw ContractError("field CSV: duplicate node in '" + line + "'");
    seen[n] = true;
    f[n] = Complex(parse_double(cell[3]), parse_double(cell[4]));
    ++rows;
  }
  if (rows != grid.size()) throw ContractError("field CSV: node count does not match grid");
  return f;
}

void write_field(const std::filesystem::path& base, const ScalarField& f) {
  nlohmann::json header = {{"grid", grid_to_json(f.grid())}, {"components", 1}};
  open_out(with_suffix(base, ".json")) << header.dump(2) << '\n';
  auto csv = open_out(with_suffix(base, ".csv"));
  write_csv(csv, f);
}

ScalarField read_field(const std::filesystem::path& base) {
  auto in = open_in(with_suffix(base, ".json"));
  const auto header = nlohmann::json::parse(in);
  const Grid grid = grid_from_json(header.at("grid"));
  auto csv = open_in(with_suffix(base, ".csv"));
  return read_csv(csv, grid);
}

void write_vector_field(const std::filesystem::path& base, const VectorField3& v) {
  nlohmann::json header = {{"grid", grid_to_json(v.grid())}, {"components", 3}};
  open_out(with_suffix(base, ".json")) << header.dump(2) << '\n';
  const char* names[3] = {".x.csv", ".y.csv", ".z.csv"};
  for (int a = 0; a < 3; ++a) {
    auto csv = open_out(with_suffix(base, names[a]));
    write_csv(csv, v[a]);
  }
}

VectorField3 read_vector_field(const std::filesystem::path& base) {
  auto in = open_in(with_suffix(base, ".json"));
  const auto header = nlohmann::json::parse(in);
  if (header.value("components", 1) != 3) throw ContractError("field header is not a vector field");
  const Grid grid = grid_from_json(header.at("grid"));
  const char* names[3] = {".x.csv", ".y.csv", ".z.csv"};
  std::array<ScalarField, 3> c;
  for (int a = 0; a < 3; ++a) {
    auto csv = open_in(with_suffix(base, names[a]));
    c[a] = read_csv(csv, grid);
  }
  return {c[0], c[1], c[2]};
}

}  // namespace optiq::io
