#pragma once

#include "plate/diagnostics.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace plate {

/// h = min(eps, h_max) / k, shrunk to the nearest spacing that divides the domain.
struct HRule {
  double k = 8.0;
  double h_max = std::numeric_limits<double>::infinity();
};

/// Parses "eps/K" (optionally ",max=H").
HRule parse_h_rule(const std::string& text);
std::string to_string(const HRule& rule);

/// Largest admissible spacing <= the rule's target for this domain.
double resolve_spacing(const Domain& domain, const HRule& rule, double eps);
/// Largest admissible spacing <= target.
double admissible_spacing(const Domain& domain, double target);

enum class ThresholdStatus { certified, not_sign_changing, non_monotone, uncertified };
std::string to_string(ThresholdStatus status);

struct ThresholdProbe {
  double eps = 0.0;
  double h = 0.0;
  double min_u = 0.0;
  bool is_nonneg = false;
};

struct ThresholdCertificate {
  double eps = 0.0;
  double h = 0.0;
  double min_u_h = 0.0;
  double min_u_h2 = 0.0;
  bool nonneg_h = false;
  bool nonneg_h2 = false;
};

struct ThresholdResult {
  ThresholdStatus status = ThresholdStatus::uncertified;
  std::vector<ThresholdProbe> history;  // in evaluation order
  std::optional<double> eps0;           // largest eps with certified positivity
  std::optional<double> eps_fail;       // smallest tested eps with a sign change
  std::optional<ThresholdCertificate> certificate;
  double tau = 0.0;
};

struct ThresholdOptions {
  HRule h_rule;
  double eps_lo = 1e-3;
  double eps_hi = 1.0;
  double bistol = 1e-3;
  double delta = 0.05;    // certificate taken at eps0 (1 - delta)
  int scan_points = 3;    // interior log-spaced probes for the monotonicity scan
  std::optional<double> postol;
  SolverOptions solver;
};

/// Bisection for the positivity threshold eps0 of the clamped plate under a
/// non-negative load. Positivity is treated as monotone in eps only after a
/// log-spaced scan of the bracket confirms it.
ThresholdResult find_eps0(const Domain& domain, const Forcing& f, const ThresholdOptions& options);

struct SweepRow {
  double eps = 0.0;
  double h = 0.0;
  std::optional<DiagnosticsReport> report;
  SolveReport solve_eps;
  SolveReport solve_0;
  std::string error;
};

/// One independent run per eps (strictly decreasing), ordered like eps_list.
/// `threads` > 1 runs entries concurrently.
std::vector<SweepRow> sweep(const Domain& domain, const Forcing& f, const std::vector<double>& eps_list,
                            const HRule& h_rule, const SolverOptions& solver = {},
                            const DiagnosticsOptions& options = {}, int threads = 1);

}  // namespace plate
