#include "plate/operators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace plate {

namespace {

struct StencilEntry {
  Index node;
  double coeff;
};

/// Row of the flux matrix S at `node`, with ghost neighbours reflected across
/// the boundary node that owns them. Delta_h u = S u / volume.
std::vector<StencilEntry> flux_row(const Grid& g, Index node) {
  std::vector<StencilEntry> row;
  const double h = g.h();
  const auto [i, j] = g.node(node);

  auto reflect = [&](int a, int n) {
    if (a < 0) return -a;
    if (a > n) return 2 * n - a;
    return a;
  };

  switch (g.domain().kind) {
    case DomainKind::interval: {
      const double c = 1.0 / (h * h);
      row.push_back({node, -2.0 * c});
      row.push_back({g.node_id(reflect(i - 1, g.nx())), c});
      row.push_back({g.node_id(reflect(i + 1, g.nx())), c});
      break;
    }
    case DomainKind::rectangle: {
      const double c = 1.0 / (h * h);
      row.push_back({node, -4.0 * c});
      row.push_back({g.node_id(reflect(i - 1, g.nx()), j), c});
      row.push_back({g.node_id(reflect(i + 1, g.nx()), j), c});
      row.push_back({g.node_id(i, reflect(j - 1, g.ny())), c});
      row.push_back({g.node_id(i, reflect(j + 1, g.ny())), c});
      break;
    }
    case DomainKind::disk_radial: {
      // Conservative form with face coefficients r_{i +- 1/2} / h; the
      // origin face has radius 0.
      const double right = (i + 0.5);
      const double left = i == 0 ? 0.0 : (i - 0.5);
      row.push_back({node, -(left + right)});
      if (i > 0) row.push_back({g.node_id(i - 1), left});
      row.push_back({g.node_id(reflect(i + 1, g.nx())), right});
      break;
    }
  }
  return row;
}

/// Control volume D in Delta_h = D^{-1} S. Unit for Cartesian grids; for the
/// disk the annulus area divided by 2 pi.
double control_volume(const Grid& g, Index node) {
  if (!g.domain().is_radial()) return 1.0;
  const int i = g.node(node).i;
  const double h = g.h();
  if (i == 0) return h * h / 8.0;
  return i * h * h;
}

/// Nodes on which the inner Laplacian of the biharmonic composition is
/// needed: interior nodes plus boundary nodes adjacent to one (corners never are).
bool carries_inner_laplacian(const Grid& g, Index node) { return !g.is_corner(node); }

}  // namespace

Field apply_laplacian(const Field& u) {
  const Grid& g = *u.grid;
  Field out = Field::zeros(u.grid);
  for (Index node : g.interior()) {
    double s = 0.0;
    for (const auto& e : flux_row(g, node)) s += e.coeff * u.values[e.node];
    out.values[node] = s / control_volume(g, node);
  }
  return out;
}

NodeIJ inward_normal(const Grid& g, Index boundary_node) {
  const auto [i, j] = g.node(boundary_node);
  switch (g.domain().kind) {
    case DomainKind::interval: return {i == 0 ? 1 : -1, 0};
    case DomainKind::disk_radial: return {-1, 0};
    case DomainKind::rectangle:
      if (g.is_corner(boundary_node)) return {0, 0};
      if (i == 0) return {1, 0};
      if (i == g.nx()) return {-1, 0};
      if (j == 0) return {0, 1};
      return {0, -1};
  }
  return {0, 0};
}

namespace {

double one_sided_second_derivative(const Field& u, Index node) {
  // (8 u_1 - u_2) / (2 h^2), exact on clamped cubics.
  const Grid& g = *u.grid;
  const NodeIJ n = inward_normal(g, node);
  const auto [i, j] = g.node(node);
  const Index n1 = g.node_id(i + n.i, j + n.j);
  const Index n2 = g.node_id(i + 2 * n.i, j + 2 * n.j);
  return (8.0 * u.values[n1] - u.values[n2]) / (2.0 * g.h() * g.h());
}

/// The scheme's own Laplacian at a boundary node: reflected ghosts, 2 u_1 / h^2.
double mirrored_second_derivative(const Field& u, Index node) {
  const Grid& g = *u.grid;
  double s = 0.0;
  for (const auto& e : flux_row(g, node)) s += e.coeff * u.values[e.node];
  return s / control_volume(g, node);
}

double boundary_second_derivative(const Field& u, Index node, TraceFormula formula) {
  return formula == TraceFormula::mirrored ? mirrored_second_derivative(u, node) : one_sided_second_derivative(u, node);
}

void require_normal_depth(const Grid& g) {
  const int along = g.domain().is_planar() ? std::min(g.nx(), g.ny()) : g.nx();
  // Interval and rectangle need nodes 1, 2 in the interior; the disk counts the origin.
  const int interior_along_normal = g.domain().is_radial() ? along : along - 1;
  if (interior_along_normal < 2)
    throw ConfigError("grid too coarse for the boundary trace: need two interior nodes along the normal");
}

}  // namespace

Field clamped_laplacian(const Field& u, TraceFormula formula) {
  const Grid& g = *u.grid;
  require_normal_depth(g);
  Field out = apply_laplacian(u);
  for (Index node : g.boundary())
    out.values[node] = g.is_corner(node) ? 0.0 : boundary_second_derivative(u, node, formula);
  return out;
}

BoundaryTrace make_trace(std::vector<Index> nodes, Vector values) {
  BoundaryTrace t;
  t.nodes = std::move(nodes);
  t.values = std::move(values);
  if (t.values.size() > 0) {
    t.l_minus = t.values.minCoeff();
    t.l_plus = t.values.maxCoeff();
  }
  t.m = std::max(std::max(0.0, t.l_plus), std::max(0.0, -t.l_minus));
  return t;
}

BoundaryTrace boundary_laplacian_trace(const Field& u, double eps, TraceFormula formula) {
  const Grid& g = *u.grid;
  require_normal_depth(g);
  std::vector<Index> nodes;
  for (Index node : g.boundary())
    if (!g.is_corner(node)) nodes.push_back(node);
  Vector values(Index(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k)
    values[Index(k)] = eps * eps * boundary_second_derivative(u, nodes[k], formula);
  return make_trace(std::move(nodes), std::move(values));
}

ClampedSystem assemble_system(const GridPtr& grid, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("eps must be >= 0");
  const Grid& g = *grid;
  const Index n = g.unknowns();

  // Inner-Laplacian nodes: unknowns first, then the non-corner boundary nodes.
  std::vector<Index> w_index(std::size_t(g.node_count()), -1);
  std::vector<Index> w_nodes(g.interior().begin(), g.interior().end());
  for (Index node : g.boundary())
    if (carries_inner_laplacian(g, node)) w_nodes.push_back(node);
  for (std::size_t k = 0; k < w_nodes.size(); ++k) w_index[std::size_t(w_nodes[k])] = Index(k);
  const Index nw = Index(w_nodes.size());

  // S_WI: inner Laplacian (flux form) from unknowns; boundary values are 0.
  // S_IW: outer Laplacian on interior rows reading inner values on W.
  std::vector<Eigen::Triplet<double, int>> s_wi;
  std::vector<Eigen::Triplet<double, int>> s_iw;
  Vector inv_volume(nw);
  for (Index k = 0; k < nw; ++k) {
    const Index node = w_nodes[std::size_t(k)];
    inv_volume[k] = 1.0 / control_volume(g, node);
    for (const auto& e : flux_row(g, node)) {
      const Index col = g.unknown_of(e.node);
      if (col >= 0) s_wi.emplace_back(int(k), int(col), e.coeff);
    }
  }
  for (Index k = 0; k < n; ++k) {
    const Index node = g.interior()[std::size_t(k)];
    for (const auto& e : flux_row(g, node)) s_iw.emplace_back(int(k), int(w_index[std::size_t(e.node)]), e.coeff);
  }

  SparseMatrix swi(nw, n);
  swi.setFromTriplets(s_wi.begin(), s_wi.end());
  SparseMatrix siw(n, nw);
  siw.setFromTriplets(s_iw.begin(), s_iw.end());

  SparseMatrix laplace = swi.topRows(n);
  SparseMatrix a = -laplace;
  if (eps > 0.0) {
    SparseMatrix scaled = inv_volume.asDiagonal() * swi;
    SparseMatrix biharmonic = siw * scaled;
    a = (eps * eps) * biharmonic - laplace;
  }

  ClampedSystem sys;
  sys.grid = grid;
  sys.eps = eps;
  sys.matrix = SparseOperator(std::move(a));
  sys.matrix.verify_symmetry(1e-12);
  sys.row_weights.resize(n);
  for (Index k = 0; k < n; ++k) sys.row_weights[k] = control_volume(g, g.interior()[std::size_t(k)]);
  return sys;
}

Vector assemble_rhs(const GridPtr& grid, const Forcing& f) { return sample_forcing(grid, f).unknowns(); }

TraceFormula parse_trace_formula(const std::string& name) {
  if (name == "mirrored") return TraceFormula::mirrored;
  if (name == "one-sided") return TraceFormula::one_sided;
  throw ConfigError("unknown trace formula '" + name + "' (mirrored|one-sided)");
}

std::string to_string(TraceFormula formula) {
  return formula == TraceFormula::mirrored ? "mirrored" : "one-sided";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "auto") return SolverKind::automatic;
  if (name == "direct") return SolverKind::direct;
  if (name == "cg-jacobi") return SolverKind::cg_jacobi;
  if (name == "cg-spectral") return SolverKind::cg_spectral;
  throw ConfigError("unknown solver '" + name + "' (auto|direct|cg-jacobi|cg-spectral)");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::automatic: return "auto";
    case SolverKind::direct: return "direct";
    case SolverKind::cg_jacobi: return "cg-jacobi";
    case SolverKind::cg_spectral: return "cg-spectral";
  }
  return "?";
}

PlateSolution solve_plate(const GridPtr& grid, double eps, const Field& load, const SolverOptions& options) {
  if (load.values.size() && load.values.minCoeff() < 0.0) throw ConfigError("load must be >= 0");
  const ClampedSystem sys = assemble_system(grid, eps);
  const Vector b = sys.weighted_rhs(load.unknowns());

  SolverKind kind = options.kind;
  if (kind == SolverKind::automatic)
    kind = grid->domain().is_planar() ? SolverKind::cg_spectral : SolverKind::direct;
  if (kind == SolverKind::cg_spectral && !grid->domain().is_planar())
    throw ConfigError("the spectral preconditioner needs a rectangle");

  PlateSolution out;
  Vector x;
  switch (kind) {
    case SolverKind::direct: {
      const auto start = std::chrono::steady_clock::now();
      x = solve_banded_direct(sys.matrix, b);
      out.report.method = "banded-ldlt";
      const double bn = b.norm();
      out.report.relative_residual = bn > 0.0 ? (sys.matrix * x - b).norm() / bn : 0.0;
      out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      break;
    }
    case SolverKind::cg_jacobi: {
      Solution s = solve_spd(sys.matrix, b, options.tol, options.maxit);
      x = std::move(s.x);
      out.report = s.report;
      break;
    }
    case SolverKind::cg_spectral:
    case SolverKind::automatic: {
      const SpectralPreconditioner pre(*grid, eps);
      Solution s = solve_pcg(
          sys.matrix, b, [&pre](const Vector& r, Vector& z) { pre.apply(r, z); }, "cg-spectral", options.tol,
          options.maxit);
      x = std::move(s.x);
      out.report = s.report;
      break;
    }
  }
  out.u = Field::from_unknowns(grid, x);
  if (!out.u.all_finite()) throw std::runtime_error("solver produced non-finite values");
  return out;
}

PlateSolution solve_plate(const GridPtr& grid, double eps, const Forcing& f, const SolverOptions& options) {
  return solve_plate(grid, eps, sample_forcing(grid, f), options);
}

}  // namespace plate
