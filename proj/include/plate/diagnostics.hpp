#pragma once

#include "plate/operators.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace plate {

struct PositivityReport {
  bool is_nonneg = true;
  double min = 0.0;
  Index argmin = -1;  // node id
};

/// is_nonneg <=> min over interior nodes >= -postol * ||u||_inf.
PositivityReport positivity_report(const Field& u, double postol);

/// Discretisation-scale positivity slack 10 h^2.
inline double default_postol(const Grid& grid) { return 10.0 * grid.h() * grid.h(); }

/// min over interior nodes of u / dist(., boundary).
double hopf_constant(const Field& u);

/// Integral of max(0, Delta_h u) over nodes within `collar_width` of the boundary.
double collar_positive_laplacian_mass(const Field& u, double eps, double collar_width,
                                      TraceFormula formula = TraceFormula::mirrored);

struct ConvergenceMetrics {
  double h1_v = 0.0;        // H1 seminorm of u_eps - u0
  double l2_eps_lap = 0.0;  // L2 norm of eps Delta_h u_eps
};

ConvergenceMetrics convergence_metrics(const Field& u_eps, const Field& u0, double eps,
                                       TraceFormula formula = TraceFormula::mirrored);

struct BoundCheck {
  std::string name;
  bool satisfied = true;
  double slack = 0.0;      // worst margin; negative means the bound is violated
  double allowance = 0.0;  // discretisation tolerance 10 h^2 * scale
  Index worst_node = -1;
};

/// The three maximum-principle bounds, nodewise on interior nodes:
///   v_bounds:      -L+_+ - eps^2 |f|_inf <= v_eps <= L-_-
///   u_lower:       u_eps >= -L+_+
///   laplace_upper: -L-_- - eps^2 |f|_inf <= eps^2 Delta u_eps <= L+_+
std::vector<BoundCheck> bound_checks(const Field& u_eps, const Field& u0, const Field& f, const BoundaryTrace& trace,
                                     double eps);

/// Outward normal derivative at a boundary node, second-order one-sided.
double normal_derivative(const Field& u, Index boundary_node);

struct BlowupProfile {
  Index x0 = -1;
  double m = 0.0;
  double beta = 0.0;
  std::vector<double> s;        // t_k / eps, increasing, s[0] = 0
  std::vector<double> samples;  // u_eps(x0 + t_k nu_in) / M
  double residual = 0.0;        // sup_k |samples_k - beta (e^{-s_k} - 1 + s_k)|
};

/// Boundary-layer blow-up at x0 sampled along the grid-aligned inward normal
/// to depth `depth_in_eps * eps`. Requires h <= eps / 4.
BlowupProfile blowup_profile(const Field& u_eps, const Field& u0, double eps, Index x0, double depth_in_eps,
                             TraceFormula formula = TraceFormula::mirrored);

/// x = 0 for the interval, the midpoint of the bottom edge for rectangles,
/// r = R for the disk.
Index default_blowup_node(const Grid& grid);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares fit of log M against log eps.
SlopeFit asymptotic_slope(std::span<const std::pair<double, double>> eps_m);

/// max over trace nodes |eps^2 Delta u_eps + eps d_nu u0| / max eps |d_nu u0|;
/// 0 when both sides vanish.
double trace_vs_limit_law(const BoundaryTrace& trace, const Field& u0, double eps);

struct DiagnosticsOptions {
  std::optional<double> postol;        // default 10 h^2
  std::optional<double> collar_width;  // default 8 eps
  double blowup_depth = 5.0;           // in units of eps
  std::optional<Index> blowup_node;    // default_blowup_node()
  TraceFormula trace_formula = TraceFormula::mirrored;
};

struct DiagnosticsReport {
  double eps = 0.0;
  double h = 0.0;
  PositivityReport positivity;
  double hopf_c0 = 0.0;
  double collar_mass = 0.0;
  double tau = 0.0;
  ConvergenceMetrics conv;
  double l_minus = 0.0;
  double l_plus = 0.0;
  double m = 0.0;
  double m_over_eps = 0.0;
  double trace_law_deviation = 0.0;
  std::optional<double> beta;
  std::optional<double> profile_residual;
  std::vector<BoundCheck> bounds;
};

DiagnosticsReport diagnose(const Field& u_eps, const Field& u0, const Field& f, double eps,
                           const DiagnosticsOptions& options = {});

/// Solves the plate and membrane problems on one grid and diagnoses them.
struct PlateRun {
  Field load;
  Field u_eps;
  Field u0;
  SolveReport solve_eps;
  SolveReport solve_0;
  DiagnosticsReport report;
};

PlateRun run_plate(const GridPtr& grid, double eps, const Forcing& f, const SolverOptions& solver = {},
                   const DiagnosticsOptions& options = {});

}  // namespace plate
