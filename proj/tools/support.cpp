#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "optiq/error.hpp"

namespace optiq::cli {

namespace {

long long parse_digits(const std::string& s, const std::string& whole) {
  if (s.empty() || s.size() > 17 || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("not an exact number: '" + whole + "'");
  return std::stoll(s);
}

Rational reduced(long long num, long long den) {
  if (den == 0) throw UsageError("zero denominator");
  if (den < 0) num = -num, den = -den;
  const long long g = std::gcd(num, den);
  return {num / (g ? g : 1), den / (g ? g : 1)};
}

std::string scalar_token(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError("config key '" + key + "' must be a string, number, boolean or array of those");
}

// Option tokens for every config key not already given on the command line.
std::vector<std::string> config_tokens(const std::string& source, const CLI::App& sub,
                                       const std::vector<std::string>& given) {
  const json cfg = load_json(source);
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || key == "help" || sub.get_option_no_throw(flag) == nullptr)
      throw UsageError("unknown config key '" + key + "' for " + sub.get_name());
    bool on_line = false;
    for (const auto& g : given) on_line |= g == flag || g.rfind(flag + "=", 0) == 0;
    if (on_line) continue;
    if (value.is_array()) {
      out.push_back(flag);
      for (const auto& v : value) out.push_back(scalar_token(v, key));
    } else {
      out.push_back(flag + "=" + scalar_token(value, key));
    }
  }
  return out;
}

void error_report(const char* kind, const std::string& message, const double* residual = nullptr) {
  json j{{"error", kind}, {"message", message}};
  if (residual) j["residual"] = std::isfinite(*residual) ? json(*residual) : json(nullptr);
  std::cerr << j.dump() << '\n';
}

struct Built {
  CLI::App app{"Numerical companions to wave-mechanics constructions", "optiq"};
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions;
  std::string config;
  int threads = 1;
};

void build(Built& b) {
  b.app.require_subcommand(1);
  b.app.set_help_flag("--help", "Print this help message and exit");
  b.app.add_option("--threads", b.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  for (const auto& spec : commands()) {
    CLI::App* sub = b.app.add_subcommand(spec.name, spec.help);
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--config", b.config, "JSON object of option values; command-line flags take precedence");
    b.actions.emplace_back(sub, spec.build(*sub));
  }
}

int parse(Built& b, const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  try {
    b.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return b.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return b.app.exit(e);
  } catch (const CLI::ParseError& e) {
    b.app.exit(e);
    return 2;
  }
  return -1;
}

}  // namespace

std::string Rational::text() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  Rational r;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    r = reduced(parse_digits(s.substr(0, slash), text), parse_digits(s.substr(slash + 1), text));
  } else if (const auto dot = s.find('.'); dot != std::string::npos) {
    const std::string frac = s.substr(dot + 1);
    const std::string whole = s.substr(0, dot);
    if (frac.size() > 15) throw UsageError("too many decimals in '" + text + "'");
    long long den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const long long w = whole.empty() ? 0 : parse_digits(whole, text);
    const long long f = frac.empty() ? 0 : parse_digits(frac, text);
    if (whole.empty() && frac.empty()) throw UsageError("not an exact number: '" + text + "'");
    r = reduced(w * den + f, den);
  } else {
    r = {parse_digits(s, text), 1};
  }
  if (negative) r.num = -r.num;
  return r;
}

CLI::Validator rational_check() {
  return CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          parse_rational(s);
          return {};
        } catch (const UsageError& e) {
          return e.what();
        }
      },
      "RATIONAL", "rational");
}

std::filesystem::path output_path(const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_relative())
    if (const char* dir = std::getenv("OPTIQ_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

void write_text(const std::string& name, const std::string& text) {
  if (name == "-") {
    std::cout << text;
    return;
  }
  const auto p = output_path(name);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  os << text;
  if (!os) throw UsageError("cannot write " + p.string());
}

void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

json load_json(const std::string& source) {
  try {
    if (!source.empty() && source.front() == '{') return json::parse(source);
    std::ifstream is(source);
    if (!is) throw UsageError("cannot read " + source);
    return json::parse(is);
  } catch (const json::exception& e) {
    throw UsageError("invalid JSON in " + (source.front() == '{' ? std::string("inline spec") : source) + ": " +
                     e.what());
  }
}

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw UsageError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("unknown key '" + key + "' in " + what);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::vector<CommandSpec> commands() {
  std::vector<CommandSpec> out;
  add_photon(out);
  add_scalar(out);
  add_rays(out);
  add_huygens(out);
  add_membrane(out);
  add_knots(out);
  add_tise(out);
  return out;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    auto first = std::make_unique<Built>();
    build(*first);
    if (int rc = parse(*first, args); rc >= 0) return rc;
    CLI::App* chosen = first->app.get_subcommands().front();
    auto* active = first.get();

    std::unique_ptr<Built> second;
    if (!first->config.empty()) {
      const auto pos = std::find(args.begin(), args.end(), chosen->get_name());
      const std::vector<std::string> given(pos + 1, args.end());
      const auto extra = config_tokens(first->config, *chosen, given);
      std::vector<std::string> merged(args.begin(), pos + 1);
      merged.insert(merged.end(), extra.begin(), extra.end());
      merged.insert(merged.end(), pos + 1, args.end());
      second = std::make_unique<Built>();
      build(*second);
      if (int rc = parse(*second, merged); rc >= 0) return rc;
      active = second.get();
      chosen = active->app.get_subcommands().front();
    }
    for (auto& [sub, action] : active->actions)
      if (sub == chosen) action();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    const double r = e.residual();
    error_report("convergence", e.what(), &r);
    return 1;
  } catch (const ContractError& e) {
    error_report("contract", e.what());
    return 1;
  } catch (const Error& e) {
    error_report("numeric", e.what());
    return 1;
  } catch (const std::exception& e) {
    error_report("internal", e.what());
    return 1;
  }
}

}  // namespace optiq::cli
