#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "optiq/grid.hpp"

namespace optiq::io {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);
double parse_double(std::string_view text);

nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

/// CSV rows `i,j,k,re,im`, one per node in storage order, with a header line.
void write_csv(std::ostream& os, const ScalarField& f);
ScalarField read_csv(std::istream& is, const Grid& grid);

/// Writes `<base>.json` (grid header) and `<base>.csv`.
void write_field(const std::filesystem::path& base, const ScalarField& f);
ScalarField read_field(const std::filesystem::path& base);

/// Writes `<base>.json` plus `<base>.x.csv`, `<base>.y.csv`, `<base>.z.csv`.
void write_vector_field(const std::filesystem::path& base, const VectorField3& v);
VectorField3 read_vector_field(const std::filesystem::path& base);

}  // namespace optiq::io
