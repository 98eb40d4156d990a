#include "cli.hpp"

#include "plate/exact.hpp"
#include "plate/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#ifndef PLATE_LAB_VERSION
#define PLATE_LAB_VERSION "0.0.0"
#endif

namespace plate::cli {

namespace {

using nlohmann::json;

// Every flag of every subcommand lands here; each subcommand registers the
// subset it understands.
struct Settings {
  std::string domain = "interval";
  double length = 1.0;
  double lx = 1.0;
  double ly = 1.0;
  double radius = 1.0;
  double eps = 0.0;
  double gamma = 0.0;
  double h = 0.0;
  std::string h_rule = "eps/8";
  std::string forcing = "const:1";
  std::string solver = "auto";
  double tol = kDefaultTolerance;
  int maxit = 100000;
  double postol = 0.0;
  double collar = 0.0;
  std::string trace = "mirrored";
  std::string out;
  std::string report;
  std::string config;
  std::string dump_operator;

  std::string model = "oned";
  double amp = 1.0;
  double beta = 1.0;
  double tmax = 5.0;
  double dt = 1e-3;

  std::vector<double> eps_list;
  std::vector<double> bracket{1e-3, 1.0};
  double bistol = 1e-3;
  double delta = 0.05;
  int scan_points = 3;
  double depth = 5.0;
  Index node = -1;
};

double parse_real(const std::string& text) {
  std::size_t used = 0;
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  }
  const std::string num = text.substr(0, slash);
  const std::string den = text.substr(slash + 1);
  return parse_real(num) / parse_real(den);
}

// Lets numeric flags take fractions such as 1/64.
const CLI::Validator kFraction(
    [](std::string& value) {
      try {
        value = io::format_double(parse_real(value));
      } catch (const std::exception&) {
        return "not a number: " + value;
      }
      return std::string();
    },
    "NUMBER|A/B", "fraction");

bool given(const CLI::App* sub, const std::string& flag) {
  const CLI::Option* opt = sub->get_option_no_throw(flag);
  return opt != nullptr && opt->count() > 0;
}

void add_domain_options(CLI::App* sub, Settings& s) {
  sub->add_option("--domain", s.domain, "interval | square | rect | disk")
      ->check(CLI::IsMember({"interval", "square", "rect", "disk"}))
      ->capture_default_str();
  sub->add_option("--L", s.length, "interval length or square side")->transform(kFraction)->capture_default_str();
  sub->add_option("--Lx", s.lx, "rectangle width")->transform(kFraction)->capture_default_str();
  sub->add_option("--Ly", s.ly, "rectangle height")->transform(kFraction)->capture_default_str();
  sub->add_option("--R", s.radius, "disk radius")->transform(kFraction)->capture_default_str();
}

void add_eps_options(CLI::App* sub, Settings& s) {
  CLI::Option* eps = sub->add_option("--eps", s.eps, "perturbation parameter eps > 0")->transform(kFraction);
  CLI::Option* gamma = sub->add_option("--gamma", s.gamma, "tension gamma; eps = gamma^(-1/2)")->transform(kFraction);
  eps->excludes(gamma);
}

void add_solver_options(CLI::App* sub, Settings& s) {
  sub->add_option("--forcing", s.forcing, "const:A | ball:CX[,CY]:R:A | delta:X[,Y]:MASS | samples:PATH")
      ->capture_default_str();
  sub->add_option("--solver", s.solver, "auto | direct | cg-jacobi | cg-spectral")
      ->check(CLI::IsMember({"auto", "direct", "cg-jacobi", "cg-spectral"}))
      ->capture_default_str();
  sub->add_option("--tol", s.tol, "relative residual tolerance for CG")->transform(kFraction)->capture_default_str();
  sub->add_option("--maxit", s.maxit, "CG iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--postol", s.postol, "positivity tolerance relative to max|u| (default 10 h^2)")
      ->transform(kFraction);
}

void add_diagnostic_options(CLI::App* sub, Settings& s) {
  sub->add_option("--collar", s.collar, "collar width (default 8 eps)")->transform(kFraction);
  sub->add_option("--trace-formula", s.trace, "mirrored | one-sided")
      ->check(CLI::IsMember({"mirrored", "one-sided"}))
      ->capture_default_str();
}

void add_spacing_options(CLI::App* sub, Settings& s) {
  sub->add_option("--h", s.h, "grid spacing; must divide the domain")->transform(kFraction);
  sub->add_option("--h-rule", s.h_rule, "spacing rule eps/K[,max=H] when --h is absent")->capture_default_str();
}

void add_config_option(CLI::App* sub, Settings& s) {
  sub->add_option("--config", s.config, "flat key=value file; command-line flags take precedence");
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

// Config values fill only the options that the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  const bool eps_on_command_line = given(sub, "--eps") || given(sub, "--gamma");
  std::set<std::string> seen;
  for (const auto& [key, value] : read_config(path)) {
    if (key == "config") throw ConfigError("config files cannot name another config file");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "' in " + path);
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw ConfigError("unknown key '" + key + "' for command " + sub->get_name());
    if (opt->count() > 0) continue;
    if ((key == "eps" || key == "gamma") && eps_on_command_line) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ": " + key + ": " + e.what());
    }
  }
}

Domain resolve_domain(const Settings& s) {
  if (s.domain == "interval") return Domain::interval(s.length);
  if (s.domain == "square") return Domain::square(s.length);
  if (s.domain == "rect") return Domain::rectangle(s.lx, s.ly);
  return Domain::disk(s.radius);
}

double resolve_eps(const CLI::App* sub, const Settings& s) {
  const bool e = given(sub, "--eps");
  const bool g = given(sub, "--gamma");
  if (e && g) throw ConfigError("--eps and --gamma are mutually exclusive");
  if (!e && !g) throw ConfigError("one of --eps or --gamma is required");
  if (g) {
    if (!(s.gamma > 0.0) || !std::isfinite(s.gamma)) throw ConfigError("--gamma must be positive");
    return 1.0 / std::sqrt(s.gamma);
  }
  if (!(s.eps > 0.0) || !std::isfinite(s.eps)) throw ConfigError("--eps must be positive");
  return s.eps;
}

double resolve_h(const CLI::App* sub, const Settings& s, const Domain& d, double eps) {
  if (given(sub, "--h")) {
    if (!(s.h > 0.0)) throw ConfigError("--h must be positive");
    return s.h;
  }
  return resolve_spacing(d, parse_h_rule(s.h_rule), eps);
}

SolverOptions solver_options(const Settings& s) {
  if (!(s.tol > 0.0)) throw ConfigError("--tol must be positive");
  SolverOptions o;
  o.kind = parse_solver_kind(s.solver);
  o.tol = s.tol;
  o.maxit = s.maxit;
  return o;
}

DiagnosticsOptions diagnostics_options(const CLI::App* sub, const Settings& s) {
  DiagnosticsOptions o;
  if (given(sub, "--postol")) o.postol = s.postol;
  if (given(sub, "--collar")) o.collar_width = s.collar;
  if (given(sub, "--depth")) o.blowup_depth = s.depth;
  if (given(sub, "--node")) o.blowup_node = s.node;
  o.trace_formula = parse_trace_formula(s.trace);
  return o;
}

int worker_count(std::size_t jobs) {
  int cap = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PLATE_LAB_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("PLATE_LAB_THREADS must be a positive integer");
    cap = int(std::min<long>(v, 4096));
  }
  return std::max(1, std::min(cap, int(std::max<std::size_t>(1, jobs))));
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Collects what the manifest records about one invocation.
struct Run {
  std::string command;
  std::vector<std::string> arguments;
  std::string config;
  json inputs = json::object();
  json tolerances = json::object();
  json solves = json::array();
  int workers = 1;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::string started_at = utc_now();

  void add_solve(const std::string& label, const SolveReport& r) {
    json j = io::to_json(r);
    j["label"] = label;
    solves.push_back(std::move(j));
  }
};

struct Output {
  std::string path;  // empty: write to stdout
  std::string content;
};

void publish(const Run& run, const std::vector<Output>& outputs, std::ostream& out) {
  json paths = json::array();
  for (const auto& o : outputs)
    if (!o.path.empty()) paths.push_back(o.path);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.start).count();
  const json manifest = {{"tool", "plate_lab"},
                         {"version", PLATE_LAB_VERSION},
                         {"command", run.command},
                         {"arguments", run.arguments},
                         {"config_file", run.config.empty() ? json(nullptr) : json(run.config)},
                         {"inputs", run.inputs},
                         {"tolerances", run.tolerances},
                         {"solves", run.solves},
                         {"workers", run.workers},
                         {"started_at", run.started_at},
                         {"wall_seconds", number(wall)},
                         {"outputs", paths}};
  const std::string text = manifest.dump(2) + "\n";
  for (const auto& o : outputs) {
    if (o.path.empty()) {
      out << o.content;
      continue;
    }
    io::write_atomic(o.path, o.content);
    io::write_atomic(io::manifest_path(o.path), text);
  }
}

json domain_json(const Domain& d) {
  json j = {{"kind", d.name()}};
  if (d.is_planar()) {
    j["Lx"] = d.lx;
    j["Ly"] = d.ly;
  } else if (d.is_radial()) {
    j["R"] = d.lx;
  } else {
    j["L"] = d.lx;
  }
  return j;
}

void record_solver(Run& run, const Settings& s, const CLI::App* sub) {
  run.tolerances["cg_tol"] = s.tol;
  run.tolerances["cg_maxit"] = s.maxit;
  run.tolerances["postol"] = given(sub, "--postol") ? json(s.postol) : json("10 h^2");
  run.inputs["solver"] = s.solver;
  run.inputs["forcing"] = s.forcing;
}

int cmd_solve(const CLI::App* sub, const Settings& s, Run& run, std::ostream& out) {
  const Domain d = resolve_domain(s);
  const double eps = resolve_eps(sub, s);
  const double h = resolve_h(sub, s, d, eps);
  const GridPtr grid = build_grid(d, h);
  const Forcing f = io::parse_forcing(s.forcing, grid);
  const SolverOptions solver = solver_options(s);
  const DiagnosticsOptions diag = diagnostics_options(sub, s);

  run.inputs = {{"domain", domain_json(d)}, {"eps", eps}, {"h", h}, {"trace_formula", s.trace}};
  record_solver(run, s, sub);

  const PlateRun result = run_plate(grid, eps, f, solver, diag);
  run.add_solve("plate", result.solve_eps);
  run.add_solve("membrane", result.solve_0);

  std::vector<Output> outputs;
  if (!s.dump_operator.empty()) {
    std::ostringstream coo;
    write_coo(coo, assemble_system(grid, eps).matrix);
    outputs.push_back({s.dump_operator, coo.str()});
  }
  if (!s.out.empty()) {
    std::ostringstream csv;
    write_field_csv(csv, result.u_eps);
    outputs.push_back({s.out, csv.str()});
  }
  const std::string report = io::to_json(result.report).dump(2) + "\n";
  if (!s.report.empty() || s.out.empty()) outputs.push_back({s.report, report});
  publish(run, outputs, out);
  return kExitOk;
}

int sample_count(double extent, double dt) {
  if (!(dt > 0.0)) throw ConfigError("--dt must be positive");
  if (!(extent > 0.0)) throw ConfigError("sampling range must be positive");
  const double n = std::ceil(extent / dt - 1e-9);
  if (n > 1e8) throw ConfigError("--dt too small for the sampling range");
  return std::max(1, int(n));
}

int cmd_exact(const CLI::App* sub, const Settings& s, Run& run, std::ostream& out) {
  std::vector<io::ProfileRow> rows;
  if (s.model == "profile") {
    if (!(s.tmax >= 0.0)) throw ConfigError("--tmax must be >= 0");
    if (!(s.dt > 0.0)) throw ConfigError("--dt must be positive");
    const exact::HalfspaceProfile<double> p{s.beta};
    const long steps = long(std::floor(s.tmax / s.dt + 1e-9));
    if (steps > 100000000L) throw ConfigError("--dt too small for --tmax");
    for (long k = 0; k <= steps; ++k) {
      const double t = double(k) * s.dt;
      rows.push_back({t, p.value(t), p.derivative(t), p.second_derivative(t)});
    }
    run.inputs = {{"model", s.model}, {"beta", s.beta}, {"tmax", s.tmax}, {"dt", s.dt}};
  } else {
    const double eps = resolve_eps(sub, s);
    if (s.model == "oned") {
      const exact::OneDimSolution sol = exact::solve_exact_1d(s.length, eps, s.amp);
      const int n = sample_count(s.length, s.dt);
      for (int k = 0; k <= n; ++k) {
        const double t = s.length * k / n;
        rows.push_back({t, sol.u(t), sol.du(t), sol.d2u(t)});
      }
      run.inputs = {{"model", s.model}, {"eps", eps}, {"L", s.length}, {"amp", s.amp}, {"samples", n + 1}};
    } else {
      const exact::RadialSolution sol = exact::solve_exact_radial(s.radius, eps, s.amp);
      const int n = sample_count(s.radius, s.dt);
      for (int k = 0; k <= n; ++k) {
        const double r = s.radius * k / n;
        rows.push_back({r, sol.u(r), sol.du(r), sol.d2u(r)});
      }
      run.inputs = {{"model", s.model}, {"eps", eps}, {"R", s.radius}, {"amp", s.amp}, {"samples", n + 1}};
    }
  }
  std::ostringstream csv;
  io::write_profile_csv(csv, rows);
  publish(run, {{s.out, csv.str()}}, out);
  return kExitOk;
}

int cmd_sweep(const CLI::App* sub, const Settings& s, Run& run, std::ostream& out) {
  const Domain d = resolve_domain(s);
  const Forcing f = io::parse_forcing(s.forcing);
  const HRule rule = parse_h_rule(s.h_rule);
  const SolverOptions solver = solver_options(s);
  const DiagnosticsOptions diag = diagnostics_options(sub, s);
  run.workers = worker_count(s.eps_list.size());
  run.inputs = {{"domain", domain_json(d)}, {"eps_list", s.eps_list}, {"h_rule", to_string(rule)},
                {"trace_formula", s.trace}};
  record_solver(run, s, sub);

  const std::vector<SweepRow> rows = sweep(d, f, s.eps_list, rule, solver, diag, run.workers);
  bool failed = false;
  json errors = json::array();
  for (const auto& row : rows) {
    if (!row.report) {
      failed = true;
      errors.push_back({{"eps", row.eps}, {"error", row.error}});
      continue;
    }
    run.add_solve("plate eps=" + io::format_double(row.eps), row.solve_eps);
    run.add_solve("membrane eps=" + io::format_double(row.eps), row.solve_0);
  }
  run.inputs["row_errors"] = errors;

  std::ostringstream csv;
  io::write_sweep_csv(csv, rows);
  publish(run, {{s.out, csv.str()}}, out);
  return failed ? kExitNumeric : kExitOk;
}

int cmd_threshold(const CLI::App* sub, const Settings& s, Run& run, std::ostream& out) {
  const Domain d = resolve_domain(s);
  const Forcing f = io::parse_forcing(s.forcing);
  if (s.bracket.size() != 2) throw ConfigError("--bracket takes lo,hi");
  ThresholdOptions o;
  o.h_rule = parse_h_rule(s.h_rule);
  o.eps_lo = s.bracket[0];
  o.eps_hi = s.bracket[1];
  o.bistol = s.bistol;
  o.delta = s.delta;
  o.scan_points = s.scan_points;
  if (given(sub, "--postol")) o.postol = s.postol;
  o.solver = solver_options(s);
  run.inputs = {{"domain", domain_json(d)},    {"bracket", s.bracket},         {"bistol", s.bistol},
                {"delta", s.delta},            {"scan_points", s.scan_points}, {"h_rule", to_string(o.h_rule)}};
  record_solver(run, s, sub);

  const ThresholdResult result = find_eps0(d, f, o);
  publish(run, {{s.out, io::to_json(result).dump(2) + "\n"}}, out);
  return kExitOk;
}

int cmd_blowup(const CLI::App* sub, const Settings& s, Run& run, std::ostream& out) {
  const Domain d = resolve_domain(s);
  const double eps = resolve_eps(sub, s);
  const double h = resolve_h(sub, s, d, eps);
  const GridPtr grid = build_grid(d, h);
  const Forcing f = io::parse_forcing(s.forcing, grid);
  const SolverOptions solver = solver_options(s);
  const TraceFormula formula = parse_trace_formula(s.trace);
  const Index node = given(sub, "--node") ? s.node : default_blowup_node(*grid);
  run.inputs = {{"domain", domain_json(d)}, {"eps", eps},  {"h", h}, {"depth_in_eps", s.depth},
                {"node", node},             {"trace_formula", s.trace}};
  record_solver(run, s, sub);

  const PlateSolution plate = solve_plate(grid, eps, f, solver);
  const PlateSolution membrane = solve_plate(grid, 0.0, f, solver);
  run.add_solve("plate", plate.report);
  run.add_solve("membrane", membrane.report);
  const BlowupProfile profile = blowup_profile(plate.u, membrane.u, eps, node, s.depth, formula);

  std::ostringstream csv;
  io::write_blowup_csv(csv, profile);
  std::vector<Output> outputs{{s.out, csv.str()}};
  if (!s.report.empty()) outputs.push_back({s.report, io::to_json(profile).dump(2) + "\n"});
  publish(run, outputs, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Finite-difference lab for the clamped plate problem eps^2 Delta^2 u - Delta u = f", "plate_lab"};
  app.set_help_flag("--help", "print help and exit");  // --h is the grid spacing
  app.set_version_flag("--version", PLATE_LAB_VERSION);
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "solve one plate problem and report diagnostics");
  add_domain_options(solve, s);
  add_eps_options(solve, s);
  add_spacing_options(solve, s);
  add_solver_options(solve, s);
  add_diagnostic_options(solve, s);
  solve->add_option("--out", s.out, "field CSV of u_eps");
  solve->add_option("--report", s.report, "diagnostics JSON (stdout when neither --out nor --report is set)");
  solve->add_option("--dump-operator", s.dump_operator, "write the assembled matrix as 'row col value' lines");
  add_config_option(solve, s);

  CLI::App* exact_cmd = app.add_subcommand("exact", "tabulate closed-form reference solutions");
  exact_cmd->add_option("--model", s.model, "oned | radial | profile")
      ->check(CLI::IsMember({"oned", "radial", "profile"}))
      ->capture_default_str();
  add_eps_options(exact_cmd, s);
  exact_cmd->add_option("--L", s.length, "interval length (oned)")->transform(kFraction)->capture_default_str();
  exact_cmd->add_option("--R", s.radius, "disk radius (radial)")->transform(kFraction)->capture_default_str();
  exact_cmd->add_option("--amp", s.amp, "constant load (oned, radial)")->transform(kFraction)->capture_default_str();
  exact_cmd->add_option("--beta", s.beta, "profile slope (profile)")->transform(kFraction)->capture_default_str();
  exact_cmd->add_option("--tmax", s.tmax, "profile range (profile)")->transform(kFraction)->capture_default_str();
  exact_cmd->add_option("--dt", s.dt, "sample spacing; oned/radial round it down to divide the range")
      ->transform(kFraction)
      ->capture_default_str();
  exact_cmd->add_option("--out", s.out, "CSV t,u,du,d2u (stdout when absent)");
  add_config_option(exact_cmd, s);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "diagnostics table over a decreasing list of eps");
  add_domain_options(sweep_cmd, s);
  sweep_cmd->add_option("--eps-list", s.eps_list, "strictly decreasing eps values a,b,c")
      ->delimiter(',')
      ->transform(kFraction);
  sweep_cmd->add_option("--h-rule", s.h_rule, "spacing rule eps/K[,max=H]")->capture_default_str();
  add_solver_options(sweep_cmd, s);
  add_diagnostic_options(sweep_cmd, s);
  sweep_cmd->add_option("--out", s.out, "sweep CSV (stdout when absent)");
  add_config_option(sweep_cmd, s);

  CLI::App* threshold_cmd = app.add_subcommand("threshold", "bisect for the positivity threshold eps0");
  add_domain_options(threshold_cmd, s);
  threshold_cmd->add_option("--bracket", s.bracket, "eps bracket lo,hi")
      ->delimiter(',')
      ->expected(2)
      ->transform(kFraction);
  threshold_cmd->add_option("--bistol", s.bistol, "bisection tolerance on eps")->transform(kFraction)->capture_default_str();
  threshold_cmd->add_option("--delta", s.delta, "certificate taken at eps0 (1 - delta)")
      ->transform(kFraction)
      ->capture_default_str();
  threshold_cmd->add_option("--scan-points", s.scan_points, "interior probes of the monotonicity scan")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  threshold_cmd->add_option("--h-rule", s.h_rule, "spacing rule eps/K[,max=H]")->capture_default_str();
  add_solver_options(threshold_cmd, s);
  threshold_cmd->add_option("--out", s.out, "threshold JSON (stdout when absent)");
  add_config_option(threshold_cmd, s);

  CLI::App* blowup_cmd = app.add_subcommand("blowup", "boundary-layer blow-up profile at an edge node");
  add_domain_options(blowup_cmd, s);
  add_eps_options(blowup_cmd, s);
  add_spacing_options(blowup_cmd, s);
  add_solver_options(blowup_cmd, s);
  blowup_cmd->add_option("--trace-formula", s.trace, "mirrored | one-sided")
      ->check(CLI::IsMember({"mirrored", "one-sided"}))
      ->capture_default_str();
  blowup_cmd->add_option("--depth", s.depth, "sampling depth in units of eps")->transform(kFraction)->capture_default_str();
  blowup_cmd->add_option("--node", s.node, "boundary node id (default: x=0, bottom-edge midpoint, r=R)");
  blowup_cmd->add_option("--out", s.out, "CSV s,u_tilde,profile (stdout when absent)");
  blowup_cmd->add_option("--report", s.report, "profile summary JSON");
  add_config_option(blowup_cmd, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run;
  run.command = sub->get_name();
  for (int k = 1; k < argc; ++k) run.arguments.emplace_back(argv[k]);
  try {
    if (!s.config.empty()) {
      apply_config(sub, s.config);
      run.config = s.config;
    }
    if (sub == solve) return cmd_solve(sub, s, run, out);
    if (sub == exact_cmd) return cmd_exact(sub, s, run, out);
    if (sub == sweep_cmd) return cmd_sweep(sub, s, run, out);
    if (sub == threshold_cmd) return cmd_threshold(sub, s, run, out);
    return cmd_blowup(sub, s, run, out);
  } catch (const std::invalid_argument& e) {
    err << "plate_lab " << run.command << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "plate_lab " << run.command << ": " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace plate::cli
