#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "optiq/grid.hpp"

namespace optiq::cli {

using nlohmann::json;

/// Bad flags, config or input files; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact rational read from "p/q", an integer or a finite decimal.
struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string text() const;
};

Rational parse_rational(const std::string& text);
/// CLI11 validator accepting anything parse_rational accepts.
CLI::Validator rational_check();

/// Resolves relative output paths against $OPTIQ_OUTPUT_DIR when it is set.
std::filesystem::path output_path(const std::string& name);
/// Writes `text`, or prints it when `name` is "-".
void write_text(const std::string& name, const std::string& text);
void write_json(const std::string& name, const json& j);

/// Reads a JSON document from a file, or inline when the text starts with '{'.
json load_json(const std::string& source);
/// Throws UsageError for keys outside `allowed`.
void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& what);

json complex_json(Complex z);
json vec_json(const Vec3& v);

/// Registered subcommand: builds its options on `sub` and returns the action to run.
using Command = std::function<std::function<void()>(CLI::App& sub)>;

struct CommandSpec {
  std::string name;
  std::string help;
  Command build;
};

std::vector<CommandSpec> commands();

void add_photon(std::vector<CommandSpec>& out);
void add_scalar(std::vector<CommandSpec>& out);
void add_rays(std::vector<CommandSpec>& out);
void add_huygens(std::vector<CommandSpec>& out);
void add_membrane(std::vector<CommandSpec>& out);
void add_knots(std::vector<CommandSpec>& out);
void add_tise(std::vector<CommandSpec>& out);

/// Full command line run; returns the exit status.
int run(int argc, char** argv);

}  // namespace optiq::cli
