#include "plate/diagnostics.hpp"

#include "plate/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plate {

PositivityReport positivity_report(const Field& u, double postol) {
  if (!(postol >= 0.0)) throw ConfigError("postol must be >= 0");
  const Grid& g = *u.grid;
  PositivityReport r;
  r.min = std::numeric_limits<double>::infinity();
  for (Index node : g.interior())
    if (u.values[node] < r.min) {
      r.min = u.values[node];
      r.argmin = node;
    }
  if (g.interior().empty()) r.min = 0.0;
  const double scale = u.values.size() ? u.values.cwiseAbs().maxCoeff() : 0.0;
  r.is_nonneg = r.min >= -postol * scale;
  return r;
}

double hopf_constant(const Field& u) {
  const Grid& g = *u.grid;
  double c0 = std::numeric_limits<double>::infinity();
  for (Index node : g.interior()) c0 = std::min(c0, u.values[node] / distance_to_boundary(g, node));
  return std::isfinite(c0) ? c0 : 0.0;
}

double collar_positive_laplacian_mass(const Field& u, double eps, double collar_width, TraceFormula formula) {
  (void)eps;
  const Grid& g = *u.grid;
  if (!(collar_width >= 2.0 * g.h() * (1.0 - 1e-12))) throw ConfigError("collar width must be at least 2h");
  const Field lap = clamped_laplacian(u, formula);
  const Vector& w = g.quadrature_weights();
  const double reach = collar_width * (1.0 + 1e-12);
  double mass = 0.0;
  for (Index k = 0; k < lap.values.size(); ++k)
    if (distance_to_boundary(g, k) <= reach) mass += w[k] * std::max(0.0, lap.values[k]);
  return mass;
}

namespace {

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid != b.grid &&
      (a.grid->node_count() != b.grid->node_count() || a.grid->h() != b.grid->h() ||
       a.grid->domain().kind != b.grid->domain().kind))
    throw ConfigError("fields live on different grids");
}

}  // namespace

ConvergenceMetrics convergence_metrics(const Field& u_eps, const Field& u0, double eps, TraceFormula formula) {
  require_same_grid(u_eps, u0);
  ConvergenceMetrics c;
  Field v{u_eps.grid, u_eps.values - u0.values};
  c.h1_v = h1_seminorm(v);
  Field lap = clamped_laplacian(u_eps, formula);
  lap.values *= eps;
  c.l2_eps_lap = discrete_norms(lap).l2;
  return c;
}

std::vector<BoundCheck> bound_checks(const Field& u_eps, const Field& u0, const Field& f, const BoundaryTrace& trace,
                                     double eps) {
  require_same_grid(u_eps, u0);
  require_same_grid(u_eps, f);
  const Grid& g = *u_eps.grid;
  const double h2 = g.h() * g.h();
  const double lp = std::max(0.0, trace.l_plus);
  const double lm = std::max(0.0, -trace.l_minus);
  const double fsup = f.values.size() ? f.values.cwiseAbs().maxCoeff() : 0.0;
  const double e2f = eps * eps * fsup;

  const Field lap = apply_laplacian(u_eps);

  auto check = [&](std::string name, auto quantity, double lower, double upper) {
    BoundCheck c;
    c.name = std::move(name);
    c.slack = std::numeric_limits<double>::infinity();
    double scale = std::max(std::abs(lower), std::isfinite(upper) ? std::abs(upper) : 0.0);
    for (Index node : g.interior()) {
      const double q = quantity(node);
      scale = std::max(scale, std::abs(q));
      const double margin = std::min(q - lower, upper - q);
      if (margin < c.slack) {
        c.slack = margin;
        c.worst_node = node;
      }
    }
    if (g.interior().empty()) c.slack = 0.0;
    c.allowance = 10.0 * h2 * scale;
    c.satisfied = c.slack >= -c.allowance;
    return c;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<BoundCheck> out;
  out.push_back(check(
      "v_bounds", [&](Index n) { return u_eps.values[n] - u0.values[n]; }, -lp - e2f, lm));
  out.push_back(check(
      "u_lower", [&](Index n) { return u_eps.values[n]; }, -lp, inf));
  out.push_back(check(
      "laplace_upper", [&](Index n) { return eps * eps * lap.values[n]; }, -lm - e2f, lp));
  return out;
}

double normal_derivative(const Field& u, Index boundary_node) {
  const Grid& g = *u.grid;
  const NodeIJ n = inward_normal(g, boundary_node);
  if (n.i == 0 && n.j == 0) return 0.0;
  const auto [i, j] = g.node(boundary_node);
  const double u1 = u.values[g.node_id(i + n.i, j + n.j)];
  const double u2 = u.values[g.node_id(i + 2 * n.i, j + 2 * n.j)];
  const double u0 = u.values[boundary_node];
  const double inward = (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * g.h());
  return -inward;
}

Index default_blowup_node(const Grid& g) {
  switch (g.domain().kind) {
    case DomainKind::interval: return g.node_id(0);
    case DomainKind::disk_radial: return g.node_id(g.nx());
    case DomainKind::rectangle: return g.node_id(g.nx() / 2, 0);
  }
  return 0;
}

BlowupProfile blowup_profile(const Field& u_eps, const Field& u0, double eps, Index x0, double depth_in_eps,
                             TraceFormula formula) {
  require_same_grid(u_eps, u0);
  const Grid& g = *u_eps.grid;
  if (!(eps > 0.0)) throw ConfigError("blow-up needs eps > 0");
  if (g.h() > 0.25 * eps * (1.0 + 1e-12)) throw ConfigError("blow-up needs h <= eps/4 to resolve the layer");
  if (x0 < 0 || x0 >= g.node_count() || !g.is_boundary(x0) || g.is_corner(x0))
    throw ConfigError("blow-up point must be an edge-interior boundary node");

  const BoundaryTrace trace = boundary_laplacian_trace(u_eps, eps, formula);
  if (!(trace.m > 0.0)) throw std::domain_error("boundary trace vanishes (M = 0); blow-up is degenerate");

  const NodeIJ n = inward_normal(g, x0);
  const auto [i0, j0] = g.node(x0);
  const int steps = int(std::floor(depth_in_eps * eps / g.h() + 1e-9));
  if (!g.contains(i0 + steps * n.i, j0 + steps * n.j))
    throw ConfigError("domain too small for the requested blow-up depth");

  BlowupProfile p;
  p.x0 = x0;
  p.m = trace.m;
  p.beta = std::abs(normal_derivative(u0, x0)) * eps / p.m;
  const exact::HalfspaceProfile<double> limit{p.beta};
  for (int k = 0; k <= steps; ++k) {
    const double s = k * g.h() / eps;
    const double sample = u_eps.values[g.node_id(i0 + k * n.i, j0 + k * n.j)] / p.m;
    p.s.push_back(s);
    p.samples.push_back(sample);
    p.residual = std::max(p.residual, std::abs(sample - limit.value(s)));
  }
  return p;
}

SlopeFit asymptotic_slope(std::span<const std::pair<double, double>> eps_m) {
  if (eps_m.size() < 3) throw ConfigError("slope fit needs at least three (eps, M) pairs");
  for (std::size_t k = 0; k < eps_m.size(); ++k) {
    if (!(eps_m[k].first > 0.0)) throw ConfigError("eps must be positive");
    if (!(eps_m[k].second > 0.0)) throw ConfigError("M must be positive for a log-log fit");
    if (k > 0 && !(eps_m[k].first < eps_m[k - 1].first)) throw ConfigError("eps must be strictly decreasing");
  }
  const double n = double(eps_m.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [e, m] : eps_m) {
    sx += std::log(e);
    sy += std::log(m);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [e, m] : eps_m) {
    const double dx = std::log(e) - mx, dy = std::log(m) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double trace_vs_limit_law(const BoundaryTrace& trace, const Field& u0, double eps) {
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < trace.nodes.size(); ++k) {
    const double limit = eps * normal_derivative(u0, trace.nodes[k]);
    worst = std::max(worst, std::abs(trace.values[Index(k)] + limit));
    scale = std::max(scale, std::abs(limit));
  }
  if (scale == 0.0) return 0.0;
  return worst / scale;
}

DiagnosticsReport diagnose(const Field& u_eps, const Field& u0, const Field& f, double eps,
                           const DiagnosticsOptions& options) {
  if (!(eps > 0.0)) throw ConfigError("diagnostics need eps > 0");
  const Grid& g = *u_eps.grid;
  DiagnosticsReport r;
  r.eps = eps;
  r.h = g.h();
  r.positivity = positivity_report(u_eps, options.postol.value_or(default_postol(g)));
  r.hopf_c0 = hopf_constant(u0);
  r.collar_mass =
      collar_positive_laplacian_mass(u_eps, eps, std::max(options.collar_width.value_or(8.0 * eps), 2.0 * g.h()),
                                                   options.trace_formula);
  r.tau = mass_ratio(f);
  r.conv = convergence_metrics(u_eps, u0, eps, options.trace_formula);

  const BoundaryTrace trace = boundary_laplacian_trace(u_eps, eps, options.trace_formula);
  r.l_minus = trace.l_minus;
  r.l_plus = trace.l_plus;
  r.m = trace.m;
  r.m_over_eps = trace.m / eps;
  r.trace_law_deviation = trace_vs_limit_law(trace, u0, eps);

  try {
    const BlowupProfile p =
        blowup_profile(u_eps, u0, eps, options.blowup_node.value_or(default_blowup_node(g)), options.blowup_depth,
                       options.trace_formula);
    r.beta = p.beta;
    r.profile_residual = p.residual;
  } catch (const std::exception&) {
    // Under-resolved layer or degenerate trace: the blow-up fields stay empty.
  }
  r.bounds = bound_checks(u_eps, u0, f, trace, eps);
  return r;
}

PlateRun run_plate(const GridPtr& grid, double eps, const Forcing& f, const SolverOptions& solver,
                   const DiagnosticsOptions& options) {
  PlateRun run;
  run.load = sample_forcing(grid, f);
  mass_ratio(run.load);  // rejects f == 0 before any solve
  PlateSolution plate = solve_plate(grid, eps, run.load, solver);
  PlateSolution membrane = solve_plate(grid, 0.0, run.load, solver);
  run.u_eps = std::move(plate.u);
  run.u0 = std::move(membrane.u);
  run.solve_eps = plate.report;
  run.solve_0 = membrane.report;
  run.report = diagnose(run.u_eps, run.u0, run.load, eps, options);
  return run;
}

}  // namespace plate
