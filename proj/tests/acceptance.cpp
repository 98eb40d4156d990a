// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "plate/diagnostics.hpp"
#include "plate/exact.hpp"
#include "plate/threshold.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace plate;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s  %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <typename Fn>
double nodal_error(const Field& u, Fn exact) {
  double e = 0.0;
  for (Index k = 0; k < u.values.size(); ++k) e = std::max(e, std::abs(u.values[k] - exact(u.grid->position(k).x())));
  return e;
}

// Every solve of criteria 3-5 lands here for criterion 10.
struct BoundLedger {
  int solves = 0;
  std::vector<std::string> violations;
  void add(const std::string& label, const DiagnosticsReport& r) {
    ++solves;
    for (const BoundCheck& b : r.bounds)
      if (!b.satisfied) violations.push_back(label + " " + b.name + fmt(" slack=%.3g", b.slack));
  }
};
BoundLedger bounds;

PlateRun run(const Domain& d, double eps, double h, const Forcing& f) {
  return run_plate(build_grid(d, h), eps, f);
}

struct SweepRun {
  std::string name;
  std::vector<double> eps;
  std::vector<DiagnosticsReport> reports;
};

const std::vector<double> kSweepEps{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};

SweepRun run_sweep(const std::string& name, const Domain& d) {
  SweepRun s{name, kSweepEps, {}};
  for (double eps : kSweepEps) {
    s.reports.push_back(run(d, eps, eps / 8, ConstantLoad{1.0}).report);
    bounds.add(fmt("%s eps=1/%g", name.c_str(), 1 / eps), s.reports.back());
  }
  return s;
}

const DiagnosticsReport& at(const SweepRun& s, double eps) {
  for (std::size_t k = 0; k < s.eps.size(); ++k)
    if (s.eps[k] == eps) return s.reports[k];
  throw std::logic_error("eps not in sweep");
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 0.1;
  const exact::OneDimSolution ref = exact::solve_exact_1d(1.0, eps, 1.0);
  std::vector<double> hs, errs;
  for (int p = 6; p <= 9; ++p) {
    const double h = std::ldexp(1.0, -p);
    const PlateSolution s = solve_plate(build_grid(Domain::interval(1.0), h), eps, ConstantLoad{1.0});
    hs.push_back(h);
    errs.push_back(nodal_error(s.u, [&](double x) { return ref.u(x); }));
  }
  const double slope = loglog_slope(hs, errs);
  const double t = seconds_since(t0);
  report(1, slope >= 1.8 && t < 5.0, "1D oracle agreement",
         fmt("eps=0.1 h=2^-6..2^-9 slope=%.4f (>=1.8) err(2^-9)=%.3e time=%.2fs (<5s)", slope, errs.back(), t));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double eps : {0.2, 0.05}) {
    const exact::RadialSolution ref = exact::solve_exact_radial(1.0, eps, 1.0);
    std::vector<double> hs, errs;
    for (int p = 8; p <= 11; ++p) {
      const double h = std::ldexp(1.0, -p);
      const PlateSolution s = solve_plate(build_grid(Domain::disk(1.0), h), eps, ConstantLoad{1.0});
      hs.push_back(h);
      errs.push_back(nodal_error(s.u, [&](double r) { return ref.u(r); }));
    }
    const double slope = loglog_slope(hs, errs);
    ok = ok && slope >= 1.8 && errs.back() <= 1e-6;
    detail += fmt("eps=%g slope=%.4f err(2^-11)=%.3e; ", eps, slope, errs.back());
  }
  const double t = seconds_since(t0);
  ok = ok && t < 10.0;
  report(2, ok, "radial disk oracle agreement", detail + fmt("(slope>=1.8, err<=1e-6) time=%.2fs (<10s)", t));
}

void criterion3() {
  int violations = 0;
  std::string detail;
  for (double gamma : {1e-1, 1.0, 1e1, 1e2, 1e3, 1e4}) {
    const double eps = 1.0 / std::sqrt(gamma);
    const double h = admissible_spacing(Domain::interval(1.0), std::min(eps, 1.0) / 16);
    const PlateRun r = run(Domain::interval(1.0), eps, h, ConstantLoad{1.0});
    bounds.add(fmt("1D gamma=%g", gamma), r.report);
    double min_u = INFINITY;
    for (Index k : r.u_eps.grid->interior()) min_u = std::min(min_u, r.u_eps.values[k]);
    if (!(min_u > 0.0)) ++violations;
    detail += fmt("g=%g:%.2e ", gamma, min_u);
  }
  report(3, violations == 0, "1D positivity for all tensions", detail + fmt("violations=%d", violations));
}

void criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 1.0 / 64;
  const Forcing f = BallLoad{{0.3, 0.4}, 0.1, 1.0};
  bool ok = true;
  std::string detail;
  for (double h : {eps / 8, eps / 16}) {
    const PlateRun r = run(Domain::square(1.0), eps, h, f);
    bounds.add(fmt("square ball h=1/%g", 1 / h), r.report);
    ok = ok && r.report.positivity.is_nonneg;
    detail += fmt("h=1/%g min=%.3e nonneg=%s; ", 1 / h, r.report.positivity.min,
                  r.report.positivity.is_nonneg ? "true" : "false");
  }
  const double t = seconds_since(t0);
  ok = ok && t < 60.0;
  report(4, ok, "square ball load positivity", detail + fmt("time=%.1fs (<60s)", t));
}

void criterion5(const std::vector<SweepRun>& sweeps) {
  bool ok = true;
  std::string detail;
  for (const SweepRun& s : sweeps) {
    std::vector<double> m;
    for (const auto& r : s.reports) m.push_back(r.m);
    const double slope = loglog_slope(s.eps, m);
    const double a = s.reports[2].m_over_eps, b = s.reports[3].m_over_eps;
    const double change = std::abs(a - b) / std::min(a, b);
    ok = ok && slope >= 0.85 && slope <= 1.15 && change < 0.2;
    detail += fmt("%s slope=%.4f M/eps=[%.4f %.4f %.4f %.4f] change=%.1f%%; ", s.name.c_str(), slope,
                  s.reports[0].m_over_eps, s.reports[1].m_over_eps, a, b, 100 * change);
  }
  report(5, ok, "asymptotic law M ~ eps", detail + "(slope in [0.85,1.15], change<20%)");
}

void criterion6(const SweepRun& line, const SweepRun& square) {
  const double d1 = at(line, 1.0 / 128).trace_law_deviation;
  const double d2 = at(square, 1.0 / 64).trace_law_deviation;
  report(6, d1 <= 0.05 && d2 <= 0.10, "boundary trace law",
         fmt("1D eps=1/128 dev=%.4f (<=0.05); square eps=1/64 dev=%.4f (<=0.10)", d1, d2));
}

void criterion7(const SweepRun& line, const SweepRun& square) {
  const DiagnosticsReport& a = at(line, 1.0 / 128);
  const DiagnosticsReport& b = at(square, 1.0 / 64);
  const double r1 = a.profile_residual.value_or(NAN) / a.beta.value_or(NAN);
  const double r2 = b.profile_residual.value_or(NAN) / b.beta.value_or(NAN);
  report(7, r1 <= 0.05 && r2 <= 0.10, "blow-up profile",
         fmt("1D eps=1/128 beta=%.5f residual/beta=%.4f (<=0.05); square eps=1/64 beta=%.5f residual/beta=%.4f "
             "(<=0.10)",
             a.beta.value_or(NAN), r1, b.beta.value_or(NAN), r2));
}

void criterion8(const SweepRun& line) {
  const DiagnosticsReport& r = at(line, 1.0 / 128);
  // f = 1 on the unit interval
  report(8, r.collar_mass >= 0.9, "collar mass", fmt("1D eps=1/128 collar=8eps mass=%.5f (>=0.9)", r.collar_mass));
}

void criterion9(const std::vector<SweepRun>& sweeps) {
  bool ok = true;
  std::string detail;
  for (const SweepRun& s : sweeps) {
    std::string h1 = "h1_v=[", l2 = "l2_eps_lap=[";
    for (std::size_t k = 0; k < s.reports.size(); ++k) {
      const ConvergenceMetrics& c = s.reports[k].conv;
      h1 += fmt(k ? " %.3e" : "%.3e", c.h1_v);
      l2 += fmt(k ? " %.3e" : "%.3e", c.l2_eps_lap);
      if (k == 0) continue;
      const ConvergenceMetrics& p = s.reports[k - 1].conv;
      ok = ok && c.h1_v < 1.02 * p.h1_v && c.l2_eps_lap < 1.02 * p.l2_eps_lap;
    }
    detail += s.name + " " + h1 + "] " + l2 + "]; ";
  }
  report(9, ok, "convergence metrics decreasing", detail + "(2% slack)");
}

void criterion10() {
  std::string detail = fmt("%d solves, %zu violations", bounds.solves, bounds.violations.size());
  for (const auto& v : bounds.violations) detail += "; " + v;
  report(10, bounds.violations.empty(), "discrete bound suite", detail);
}

template <typename Fn>
long double fd4(Fn f, long double x, long double h) {
  auto raw = [&](long double s) {
    return (f(x - 2 * s) - 4 * f(x - s) + 6 * f(x) - 4 * f(x + s) + f(x + 2 * s)) / (s * s * s * s);
  };
  return (4 * raw(h) - raw(2 * h)) / 3;
}
template <typename Fn>
long double fd2(Fn f, long double x, long double h) {
  auto raw = [&](long double s) { return (f(x - s) - 2 * f(x) + f(x + s)) / (s * s); };
  return (4 * raw(h) - raw(2 * h)) / 3;
}

void criterion11(const std::vector<SweepRun>& sweeps) {
  // clamped members of the basis: v(0) = v'(0) = 0 with v1' = sinh, v2' = cosh - 1
  const exact::OdeBasis<double> b0 = exact::ode_basis(0.0);
  const bool initial = b0.v1 == 0.0 && b0.v2 == 0.0 && b0.sinh_t == 0.0 && b0.cosh_t - 1.0 == 0.0;

  const long double h = 1.0L / 256;
  auto v1 = [](long double t) { return exact::ode_basis(t).v1; };
  auto v2 = [](long double t) { return exact::ode_basis(t).v2; };
  double ode = 0.0;
  for (long double t : {0.25L, 0.5L, 1.0L, 2.0L, 3.0L}) {
    ode = std::max(ode, double(std::abs(fd4(v1, t, h) - fd2(v1, t, h))));
    ode = std::max(ode, double(std::abs(fd4(v2, t, h) - fd2(v2, t, h))));
  }

  double wrong = 0.0;
  for (int k = 0; k < 10; ++k) wrong = std::max(wrong, std::abs(exact::wrong_sign_residual(0.7 * k + 0.1)));

  bool layer = true;
  std::string detail;
  for (const SweepRun& s : sweeps) {
    const DiagnosticsReport& r = s.reports.back();
    const bool m_is_lplus = std::abs(r.m - r.l_plus) <= 1e-12 * r.m;
    layer = layer && r.l_minus > 0.0 && m_is_lplus;
    detail += fmt("%s eps=1/128 L-=%.4e L+=%.4e M=L+:%s; ", s.name.c_str(), r.l_minus, r.l_plus,
                  m_is_lplus ? "yes" : "no");
  }
  const bool ok = initial && ode <= 1e-6 && wrong <= 1e-15 && layer;
  report(11, ok, "analytic checks",
         fmt("basis initial conditions exact=%s; ODE residual=%.2e (<=1e-6); wrong-sign residual=%.1e (<=1e-15); ",
             initial ? "yes" : "no", ode, wrong) +
             detail + "(L->0, M=L+)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool cli_runs_identical(const fs::path& dir, std::string& detail) {
  const std::string exe = PLATE_LAB_EXE;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"solve --domain square --eps 1/32 --h 1/128 --forcing ball:0.3,0.4:0.1:1 --out {}/u.csv --report {}/r.json",
       {"u.csv", "r.json"}},
      {"sweep --domain interval --eps-list 1/16,1/32,1/64 --out {}/s.csv", {"s.csv"}},
      {"threshold --domain interval --bracket 0.05,1 --bistol 0.01 --out {}/t.json", {"t.json"}},
      {"blowup --domain interval --eps 1/128 --out {}/b.csv --report {}/b.json", {"b.csv", "b.json"}},
      {"exact --model radial --eps 0.05 --dt 0.01 --out {}/x.csv", {"x.csv"}},
  };
  bool ok = true;
  int compared = 0;
  for (const auto& [args, files] : runs) {
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path sub = dir / std::to_string(rep);
      fs::create_directories(sub);
      std::string line = args;
      for (auto pos = line.find("{}"); pos != std::string::npos; pos = line.find("{}"))
        line.replace(pos, 2, sub.string());
      const int status = std::system((exe + " " + line + " >/dev/null 2>&1").c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        detail += "'" + line + "' failed; ";
        return false;
      }
      for (const auto& f : files) {
        const std::string content = slurp(sub / f);
        if (rep == 0) {
          first[f] = content;
        } else {
          ++compared;
          if (content != first[f] || content.empty()) {
            ok = false;
            detail += f + " differs; ";
          }
        }
      }
    }
  }
  detail += fmt("%d outputs byte-identical=%s", compared, ok ? "yes" : "no");
  return ok;
}

void criterion12() {
  double worst_sym = 0.0;
  const std::vector<std::pair<Domain, std::pair<double, double>>> systems{
      {Domain::interval(1.0), {0.1, 1.0 / 256}},  {Domain::interval(1.0), {1.0 / 128, 1.0 / 1024}},
      {Domain::square(1.0), {1.0 / 16, 1.0 / 64}}, {Domain::rectangle(1.0, 0.5), {0.05, 1.0 / 80}},
      {Domain::disk(1.0), {0.2, 1.0 / 256}},       {Domain::disk(1.0), {0.05, 1.0 / 2048}},
  };
  for (const auto& [d, p] : systems)
    worst_sym = std::max(worst_sym, symmetry_defect(assemble_system(build_grid(d, p.second), p.first).matrix));

  // Jacobi CG needs h comparable to eps; h = eps / 8 keeps the condition number moderate
  const double tol = 1e-10;
  double worst_cg = 0.0;
  for (int n : {64, 256, 1024, 4096}) {
    const GridPtr g = build_grid(Domain::interval(1.0), 1.0 / n);
    const ClampedSystem sys = assemble_system(g, 8.0 / n);
    const Vector b = sys.weighted_rhs(assemble_rhs(g, ConstantLoad{1.0}));
    const Vector direct = solve_banded_direct(sys.matrix, b);
    const Solution cg = solve_spd(sys.matrix, b, tol);
    worst_cg = std::max(worst_cg, (direct - cg.x).cwiseAbs().maxCoeff() / direct.cwiseAbs().maxCoeff());
  }

  const fs::path dir = fs::temp_directory_path() / ("plate_acceptance_" + std::to_string(::getpid()));
  std::string cli;
  const bool same = cli_runs_identical(dir, cli);
  fs::remove_all(dir);

  report(12, worst_sym <= 1e-12 && worst_cg <= 10 * tol && same, "infrastructure",
         fmt("symmetry defect=%.1e (<=1e-12); CG vs direct rel=%.2e (<=1e-9); ", worst_sym, worst_cg) + cli);
}

void guarded(int id, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, "exception", e.what());
  }
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);

  std::vector<SweepRun> sweeps;
  try {
    sweeps.push_back(run_sweep("1D", Domain::interval(1.0)));
    sweeps.push_back(run_sweep("square", Domain::square(1.0)));
  } catch (const std::exception& e) {
    for (int id : {5, 6, 7, 8, 9, 11}) report(id, false, "sweep failed", e.what());
  }
  if (sweeps.size() == 2) {
    guarded(5, [&] { criterion5(sweeps); });
    guarded(6, [&] { criterion6(sweeps[0], sweeps[1]); });
    guarded(7, [&] { criterion7(sweeps[0], sweeps[1]); });
    guarded(8, [&] { criterion8(sweeps[0]); });
    guarded(9, [&] { criterion9(sweeps); });
  }
  guarded(10, criterion10);
  if (sweeps.size() == 2) guarded(11, [&] { criterion11(sweeps); });
  guarded(12, criterion12);

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
