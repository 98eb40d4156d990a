#include "plate/threshold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace plate {

namespace {

double parse_positive(const std::string& text, const std::string& rule) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0 && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("malformed h-rule '" + rule + "'");
}

}  // namespace

HRule parse_h_rule(const std::string& text) {
  HRule rule;
  std::string body = text;
  const auto comma = body.find(',');
  if (comma != std::string::npos) {
    const std::string tail = body.substr(comma + 1);
    body = body.substr(0, comma);
    if (tail.rfind("max=", 0) != 0) throw ConfigError("h-rule suffix must be ',max=H'");
    rule.h_max = parse_positive(tail.substr(4), text);
  }
  if (body.rfind("eps/", 0) != 0) throw ConfigError("h-rule must look like eps/K");
  rule.k = parse_positive(body.substr(4), text);
  if (!(rule.k >= 4.0)) throw ConfigError("h-rule needs K >= 4 to resolve the boundary layer");
  return rule;
}

std::string to_string(const HRule& rule) {
  char buf[64];
  if (std::isfinite(rule.h_max)) {
    std::snprintf(buf, sizeof buf, "eps/%.17g,max=%.17g", rule.k, rule.h_max);
  } else {
    std::snprintf(buf, sizeof buf, "eps/%.17g", rule.k);
  }
  return buf;
}

double admissible_spacing(const Domain& domain, double target) {
  if (!(target > 0.0)) throw ConfigError("target spacing must be positive");
  const double side = domain.lx;
  const int n0 = std::max(2, int(std::ceil(side / target - 1e-9)));
  if (!domain.is_planar()) return side / n0;
  for (int n = n0; n <= 64 * n0; ++n) {
    const double h = side / n;
    const double ny = domain.ly / h;
    if (std::round(ny) >= 2.0 && std::abs(domain.ly - std::round(ny) * h) <= 1e-9 * domain.ly) return h;
  }
  throw ConfigError("no spacing near the target divides both rectangle sides");
}

double resolve_spacing(const Domain& domain, const HRule& rule, double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  return admissible_spacing(domain, std::min(eps, rule.h_max) / rule.k);
}

std::string to_string(ThresholdStatus status) {
  switch (status) {
    case ThresholdStatus::certified: return "certified";
    case ThresholdStatus::not_sign_changing: return "bracket not sign-changing";
    case ThresholdStatus::non_monotone: return "non-monotone";
    case ThresholdStatus::uncertified: return "uncertified";
  }
  return "?";
}

namespace {

struct Prober {
  const Domain& domain;
  const Forcing& forcing;
  const ThresholdOptions& options;

  ThresholdProbe at(double eps, double h) const {
    const GridPtr grid = build_grid(domain, h);
    const PlateSolution s = solve_plate(grid, eps, forcing, options.solver);
    const PositivityReport p = positivity_report(s.u, options.postol.value_or(default_postol(*grid)));
    return {eps, h, p.min, p.is_nonneg};
  }
  ThresholdProbe at(double eps) const { return at(eps, resolve_spacing(domain, options.h_rule, eps)); }
};

}  // namespace

ThresholdResult find_eps0(const Domain& domain, const Forcing& f, const ThresholdOptions& options) {
  if (!(options.eps_lo > 0.0) || !(options.eps_hi > options.eps_lo))
    throw ConfigError("bracket must satisfy 0 < eps_lo < eps_hi");
  if (!(options.bistol > 0.0)) throw ConfigError("bisection tolerance must be positive");
  if (!(options.delta >= 0.0 && options.delta < 1.0)) throw ConfigError("certificate offset delta must be in [0, 1)");

  ThresholdResult result;
  {
    const GridPtr coarse = build_grid(domain, resolve_spacing(domain, options.h_rule, options.eps_hi));
    result.tau = mass_ratio(sample_forcing(coarse, f));  // rejects f == 0
  }
  const Prober probe{domain, f, options};

  // Log-spaced scan of the bracket, ascending in eps.
  std::vector<double> scan{options.eps_lo};
  const int inner = std::max(0, options.scan_points);
  for (int k = 1; k <= inner; ++k)
    scan.push_back(options.eps_lo * std::pow(options.eps_hi / options.eps_lo, double(k) / (inner + 1)));
  scan.push_back(options.eps_hi);
  std::vector<ThresholdProbe> scanned;
  for (double eps : scan) {
    scanned.push_back(probe.at(eps));
    result.history.push_back(scanned.back());
  }

  if (!scanned.front().is_nonneg) {
    result.status = ThresholdStatus::uncertified;
    result.eps_fail = scanned.front().eps;
    return result;
  }
  std::size_t first_fail = scanned.size();
  for (std::size_t k = 0; k < scanned.size(); ++k)
    if (!scanned[k].is_nonneg) {
      first_fail = k;
      break;
    }
  for (std::size_t k = first_fail; k < scanned.size(); ++k)
    if (scanned[k].is_nonneg) {
      result.status = ThresholdStatus::non_monotone;
      return result;
    }
  if (first_fail == scanned.size()) {
    result.status = ThresholdStatus::not_sign_changing;
    result.eps0 = options.eps_hi;
    return result;
  }

  double lo = scanned[first_fail - 1].eps;
  double hi = scanned[first_fail].eps;
  while (hi - lo > options.bistol) {
    const double mid = 0.5 * (lo + hi);
    const ThresholdProbe p = probe.at(mid);
    result.history.push_back(p);
    (p.is_nonneg ? lo : hi) = mid;
  }
  result.eps0 = lo;
  result.eps_fail = hi;

  ThresholdCertificate cert;
  cert.eps = lo * (1.0 - options.delta);
  cert.h = resolve_spacing(domain, options.h_rule, cert.eps);
  const ThresholdProbe coarse = probe.at(cert.eps, cert.h);
  const ThresholdProbe fine = probe.at(cert.eps, 0.5 * cert.h);
  cert.min_u_h = coarse.min_u;
  cert.min_u_h2 = fine.min_u;
  cert.nonneg_h = coarse.is_nonneg;
  cert.nonneg_h2 = fine.is_nonneg;
  result.certificate = cert;
  result.status = cert.nonneg_h && cert.nonneg_h2 ? ThresholdStatus::certified : ThresholdStatus::uncertified;
  return result;
}

std::vector<SweepRow> sweep(const Domain& domain, const Forcing& f, const std::vector<double>& eps_list,
                            const HRule& h_rule, const SolverOptions& solver, const DiagnosticsOptions& options,
                            int threads) {
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw ConfigError("sweep eps values must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw ConfigError("sweep eps list must be strictly decreasing");
  }
  validate_forcing(f);

  std::vector<SweepRow> rows(eps_list.size());
  auto run_one = [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.eps = eps_list[k];
    try {
      row.h = resolve_spacing(domain, h_rule, row.eps);
      PlateRun run = run_plate(build_grid(domain, row.h), row.eps, f, solver, options);
      row.report = std::move(run.report);
      row.solve_eps = run.solve_eps;
      row.solve_0 = run.solve_0;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const int workers = std::clamp(threads, 1, int(std::max<std::size_t>(1, eps_list.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < rows.size(); ++k) run_one(k);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < rows.size(); k = next++) run_one(k);
    });
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace plate
