#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "curlforge/catalog.hpp"
#include "curlforge/diagnostics.hpp"
#include "curlforge/integrate.hpp"
#include "curlforge/version.hpp"

namespace curlforge::cli {

using nlohmann::json;

// Manifest and formatting -----------------------------------------------------

std::string RunManifest::to_json() const {
  json j;
  j["system"] = system;
  j["params"] = params;
  j["potential"] = potential;
  j["x0"] = x0;
  j["t0"] = t0;
  j["t1"] = t1;
  j["dt"] = dt;
  j["outputs"] = outputs;
  j["version"] = version;
  j["timestamp"] = timestamp;
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  m.system = j.at("system").get<std::string>();
  m.params = j.at("params").get<ParamMap>();
  m.potential = j.at("potential").get<std::string>();
  m.x0 = j.at("x0").get<std::vector<double>>();
  m.t0 = j.at("t0").get<double>();
  m.t1 = j.at("t1").get<double>();
  m.dt = j.at("dt").get<double>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.version = j.at("version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  return m;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const bool with_z = !traj.states.empty() && traj.states.front().size() == 5;
  os << "t,x,y,p_x,p_y" << (with_z ? ",z" : "") << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_double(traj.times[k]);
    for (Index i = 0; i < traj.states[k].size(); ++i) os << ',' << format_double(traj.states[k][i]);
    os << '\n';
  }
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& text,
                                                     const std::string& what) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError(what + ": expected name=value, got '" + text + "'");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

// Raw option values as given on the command line. Numeric options are kept as
// text so that config-file values can be merged before interpretation.
struct RawOptions {
  std::string system;
  std::vector<std::string> systems;
  std::vector<std::string> params;
  std::vector<std::string> grid;
  std::string potential;
  std::string x0;
  std::string t0;
  std::string t1;
  std::string duration;
  std::string dt;
  std::string tol;
  std::string out;
  std::string config;
};

// Resolved settings: config file first, command-line flags on top.
struct Settings {
  std::map<std::string, std::string> scalars;
  ParamMap params;
  std::vector<std::pair<std::string, std::vector<double>>> grid;

  bool has(const std::string& key) const { return scalars.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const {
    const auto it = scalars.find(key);
    return it == scalars.end() ? fallback : it->second;
  }
};

void set_grid(Settings& s, const std::string& name, std::vector<double> values) {
  for (auto& [n, v] : s.grid) {
    if (n == name) {
      v = std::move(values);
      return;
    }
  }
  s.grid.emplace_back(name, std::move(values));
}

void apply_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto [key, value] = split_assignment(body, path + ":" + std::to_string(number));
    if (key.rfind("param.", 0) == 0) {
      s.params[key.substr(6)] = parse_double(value, "param " + key.substr(6));
    } else if (key.rfind("grid.", 0) == 0) {
      set_grid(s, key.substr(5), parse_list(value, "grid " + key.substr(5)));
    } else {
      static const std::set<std::string> known{"system", "systems", "potential", "x0", "t0",
                                               "t1",     "T",       "dt",        "tol", "out"};
      if (!known.count(key)) throw UsageError(path + ": unknown key '" + key + "'");
      s.scalars[key] = value;
    }
  }
}

Settings resolve(const RawOptions& raw) {
  Settings s;
  if (!raw.config.empty()) apply_config_file(raw.config, s);
  auto overlay = [&](const std::string& key, const std::string& value) {
    if (!value.empty()) s.scalars[key] = value;
  };
  overlay("system", raw.system);
  if (!raw.systems.empty()) {
    std::string joined;
    for (const std::string& name : raw.systems) joined += (joined.empty() ? "" : ",") + name;
    s.scalars["systems"] = joined;
  }
  overlay("potential", raw.potential);
  overlay("x0", raw.x0);
  overlay("t0", raw.t0);
  if (!raw.t1.empty() || !raw.duration.empty()) {
    // An end time on the command line replaces whichever form the file used.
    s.scalars.erase("t1");
    s.scalars.erase("T");
  }
  overlay("t1", raw.t1);
  overlay("T", raw.duration);
  overlay("dt", raw.dt);
  overlay("tol", raw.tol);
  overlay("out", raw.out);
  for (const std::string& p : raw.params) {
    const auto [name, value] = split_assignment(p, "--param");
    s.params[name] = parse_double(value, "param " + name);
  }
  for (const std::string& g : raw.grid) {
    const auto [name, values] = split_assignment(g, "--grid");
    set_grid(s, name, parse_list(values, "grid " + name));
  }
  return s;
}

struct TimeSpan {
  double t0 = 0.0;
  double t1 = 10.0;
  double dt = 1e-3;
};

TimeSpan time_span(const Settings& s) {
  TimeSpan span;
  if (s.has("t1") && s.has("T")) throw UsageError("give either --t1 or --T, not both");
  span.t0 = s.has("t0") ? parse_double(s.get("t0"), "--t0") : 0.0;
  if (s.has("t1")) {
    span.t1 = parse_double(s.get("t1"), "--t1");
  } else {
    span.t1 = span.t0 + (s.has("T") ? parse_double(s.get("T"), "--T") : 10.0);
  }
  span.dt = s.has("dt") ? parse_double(s.get("dt"), "--dt") : 1e-3;
  if (!(span.dt > 0.0)) throw UsageError("--dt must be positive");
  if (!(span.t1 > span.t0)) throw UsageError("end time must exceed the start time");
  if (span.dt > span.t1 - span.t0) throw UsageError("--dt exceeds the integration span");
  return span;
}

std::optional<Potential> potential_for(const CatalogEntry& entry, const Settings& s, bool strict) {
  if (!entry.takes_potential) {
    if (strict && s.has("potential")) {
      throw UsageError("system '" + entry.name + "' does not take a potential");
    }
    return std::nullopt;
  }
  try {
    return Potential::named(s.get("potential", "quadratic"));
  } catch (const CatalogError& e) {
    throw UsageError(e.what());
  }
}

const CatalogEntry& entry_for(const std::string& name) {
  if (name.empty()) throw UsageError("--system is required");
  try {
    return find_entry(name);
  } catch (const CatalogError& e) {
    throw UsageError(e.what());
  }
}

SystemDefinition build_from(const CatalogEntry& entry, const ParamMap& overrides,
                            const Settings& s, bool strict_potential) {
  try {
    return build_system(entry.name, entry.with_defaults(overrides),
                        potential_for(entry, s, strict_potential));
  } catch (const CatalogError& e) {
    throw UsageError(e.what());
  }
}

Vector initial_state(const SystemDefinition& sys, const Settings& s) {
  if (!s.has("x0")) return default_initial_state(sys);
  const std::vector<double> values = parse_list(s.get("x0"), "--x0");
  if (static_cast<Index>(values.size()) != sys.dim) {
    throw UsageError("--x0 needs " + std::to_string(sys.dim) + " values for " + sys.name +
                     ", got " + std::to_string(values.size()));
  }
  return Eigen::Map<const Vector>(values.data(), sys.dim);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path + "'");
  os << content;
  if (!os) throw UsageError("failed writing '" + path + "'");
}

int numerical_failure(std::ostream& err, const IntegrationError& e, double t0, double dt) {
  err << "error: numerical " << e.what() << " (last finite sample at t = "
      << format_double(t0 + static_cast<double>(e.last_finite_index()) * dt) << ")\n";
  return kExitNumerical;
}

// Commands --------------------------------------------------------------------

int cmd_list(std::ostream& out) {
  std::size_t width = 0;
  for (const CatalogEntry& e : list_catalog()) width = std::max(width, e.name.size());
  for (const CatalogEntry& e : list_catalog()) {
    std::string params;
    for (const ParamSpec& p : e.params) {
      params += (params.empty() ? "" : ",") + p.name + "=" + format_double(p.default_value);
    }
    if (e.takes_potential) params += std::string(params.empty() ? "" : ",") + "U=quadratic";
    out << std::left << std::setw(static_cast<int>(width) + 2) << e.name << std::setw(19)
        << to_string(e.formulation) << std::setw(34) << (params.empty() ? "-" : params)
        << e.equations << '\n';
  }
  return kExitOk;
}

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
  const CatalogEntry& entry = entry_for(s.get("system"));
  const SystemDefinition sys = build_from(entry, s.params, s, true);
  const TimeSpan span = time_span(s);
  const Vector x0 = initial_state(sys, s);
  Trajectory traj;
  try {
    traj = integrate(sys, x0, span.t0, span.t1, span.dt);
  } catch (const IntegrationError& e) {
    return numerical_failure(err, e, span.t0, span.dt);
  }
  const std::string path = s.get("out");
  if (path.empty()) {
    write_csv(out, traj);
    return kExitOk;
  }
  std::ostringstream csv;
  write_csv(csv, traj);
  write_file(path, csv.str());

  RunManifest manifest;
  manifest.system = sys.name;
  manifest.params = sys.params;
  manifest.potential = sys.potential;
  manifest.x0.assign(x0.data(), x0.data() + x0.size());
  manifest.t0 = span.t0;
  manifest.t1 = span.t1;
  manifest.dt = span.dt;
  const std::string manifest_path = path + ".manifest.json";
  manifest.outputs = {path, manifest_path};
  manifest.version = kVersion;
  manifest.timestamp = utc_timestamp();
  write_file(manifest_path, manifest.to_json() + "\n");
  out << "wrote " << traj.size() << " samples to " << path << '\n';
  return kExitOk;
}

int cmd_check(const Settings& s, std::ostream& out, std::ostream& err) {
  const CatalogEntry& entry = entry_for(s.get("system"));
  const SystemDefinition sys = build_from(entry, s.params, s, true);
  const TimeSpan span = time_span(s);
  const Vector x0 = initial_state(sys, s);
  InvariantReport report;
  try {
    report = check_invariants(sys, integrate(sys, x0, span.t0, span.t1, span.dt));
  } catch (const IntegrationError& e) {
    return numerical_failure(err, e, span.t0, span.dt);
  }
  const std::string text = to_json(report) + "\n";
  out << text;
  if (s.has("out")) write_file(s.get("out"), text);
  return report.verdict() ? kExitOk : kExitFailed;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> names;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

int cmd_compare(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> names = split_names(s.get("systems"));
  if (names.size() < 2) throw UsageError("--systems needs at least two catalog names");
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
    throw UsageError("--systems lists a system more than once");
  }
  std::set<std::string> used;
  std::vector<SystemDefinition> systems;
  for (const std::string& name : names) {
    const CatalogEntry& entry = entry_for(name);
    // Shared parameters apply to every system whose schema has them.
    ParamMap own;
    for (const auto& [k, v] : s.params) {
      if (entry.has_param(k)) {
        own[k] = v;
        used.insert(k);
      }
    }
    systems.push_back(build_from(entry, own, s, false));
  }
  for (const auto& [k, v] : s.params) {
    if (!used.count(k)) throw UsageError("no compared system has parameter '" + k + "'");
  }
  Eigen::Vector4d config = kDefaultConfiguration;
  if (s.has("x0")) {
    const std::vector<double> values = parse_list(s.get("x0"), "--x0");
    if (values.size() != 4) throw UsageError("compare takes --x0 x,y,xdot,ydot");
    config = Eigen::Map<const Eigen::Vector4d>(values.data());
  }
  const TimeSpan span = time_span(s);
  const double tol = s.has("tol") ? parse_double(s.get("tol"), "--tol") : 1e-7;
  ComparisonResult result;
  try {
    result = compare_configurations(systems, config, span.t0, span.t1, span.dt, tol);
  } catch (const IntegrationError& e) {
    return numerical_failure(err, e, span.t0, span.dt);
  }
  const std::string text = to_json(result) + "\n";
  out << text;
  if (s.has("out")) write_file(s.get("out"), text);
  return result.verdict() ? kExitOk : kExitFailed;
}

int cmd_stability(const Settings& s, std::ostream& out) {
  const CatalogEntry& entry = entry_for(s.get("system"));
  const SystemDefinition base = build_from(entry, s.params, s, true);
  if (!base.linear) {
    throw UsageError("system '" + entry.name + "' is not a constant-coefficient linear system");
  }
  if (s.grid.empty()) throw UsageError("empty parameter grid (use --grid name=v1,v2,...)");
  for (const auto& [name, values] : s.grid) {
    if (!entry.has_param(name)) {
      throw UsageError("system '" + entry.name + "' has no parameter '" + name + "'");
    }
  }
  // Cartesian product, first grid axis varying slowest.
  std::vector<ParamMap> points{entry.with_defaults(s.params)};
  for (const auto& [name, values] : s.grid) {
    std::vector<ParamMap> next;
    for (const ParamMap& p : points) {
      for (double v : values) {
        ParamMap q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  for (const ParamMap& p : points) {
    if (!build_system(entry.name, p).linear) {
      throw UsageError("grid point leaves the linear family of '" + entry.name + "'");
    }
  }
  const std::vector<StabilityResult> results = stability_sweep(entry.name, points);

  std::ostringstream csv;
  for (const ParamSpec& p : entry.params) csv << p.name << ',';
  for (int k = 0; k < 4; ++k) csv << "re" << k << ",im" << k << ',';
  csv << "max_re,classification\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const ParamSpec& p : entry.params) csv << format_double(points[i].at(p.name)) << ',';
    for (Index k = 0; k < results[i].eigenvalues.size(); ++k) {
      csv << format_double(results[i].eigenvalues[k].real()) << ','
          << format_double(results[i].eigenvalues[k].imag()) << ',';
    }
    csv << format_double(results[i].max_real_part) << ','
        << to_string(results[i].classification) << '\n';
  }
  if (s.has("out")) {
    write_file(s.get("out"), csv.str());
  } else {
    out << csv.str();
  }
  return kExitOk;
}

void add_system_options(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--system", raw.system, "catalog system name");
  cmd->add_option("--param", raw.params, "parameter override name=value (repeatable)");
  cmd->add_option("--potential", raw.potential, "U choice: linear, quadratic or sine");
  cmd->add_option("--config", raw.config, "key=value file; flags take precedence");
}

void add_time_options(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--x0", raw.x0, "initial state v1,v2,...");
  cmd->add_option("--t0", raw.t0, "start time (default 0)");
  cmd->add_option("--t1", raw.t1, "end time");
  cmd->add_option("--T", raw.duration, "duration, t1 = t0 + T (default 10)");
  cmd->add_option("--dt", raw.dt, "step (default 1e-3)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and verify curl-force systems", "curlforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  RawOptions raw;

  CLI::App* list = app.add_subcommand("list", "catalog table");
  CLI::App* simulate = app.add_subcommand("simulate", "integrate a system and write CSV");
  add_system_options(simulate, raw);
  add_time_options(simulate, raw);
  simulate->add_option("--out", raw.out, "CSV path; a manifest is written next to it");

  CLI::App* check = app.add_subcommand("check", "run the invariant suite, print a JSON report");
  add_system_options(check, raw);
  add_time_options(check, raw);
  check->add_option("--out", raw.out, "also write the report here");

  CLI::App* compare = app.add_subcommand("compare", "pairwise configuration divergence");
  compare->add_option("--systems", raw.systems, "comma-separated system names")->delimiter(',');
  compare->add_option("--param", raw.params, "shared parameter name=value (repeatable)");
  compare->add_option("--potential", raw.potential, "U choice for systems that take one");
  compare->add_option("--config", raw.config, "key=value file; flags take precedence");
  add_time_options(compare, raw);
  compare->get_option("--x0")->description("initial configuration x,y,xdot,ydot");
  compare->add_option("--tol", raw.tol, "divergence tolerance (default 1e-7)");
  compare->add_option("--out", raw.out, "also write the JSON table here");

  CLI::App* stability = app.add_subcommand("stability", "eigenvalue sweep of a linear system");
  add_system_options(stability, raw);
  stability->add_option("--grid", raw.grid, "axis name=v1,v2,... (repeatable)");
  stability->add_option("--out", raw.out, "CSV path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (list->parsed()) return cmd_list(out);
    const Settings settings = resolve(raw);
    if (simulate->parsed()) return cmd_simulate(settings, out, err);
    if (check->parsed()) return cmd_check(settings, out, err);
    if (compare->parsed()) return cmd_compare(settings, out, err);
    if (stability->parsed()) return cmd_stability(settings, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EvaluationDomainError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace curlforge::cli
