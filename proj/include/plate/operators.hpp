#pragma once

#include "plate/linalg.hpp"
#include "plate/mesh.hpp"

#include <string>
#include <vector>

namespace plate {

/// Discrete Laplacian on interior nodes from the stored node values
/// (3-point, 5-point or the conservative radial stencil, 4(u1 - u0)/h^2 at
/// the origin). Boundary entries of the result are 0.
Field apply_laplacian(const Field& u);

/// How the Laplacian is evaluated on a boundary node where u = d_nu u = 0.
///   mirrored:  the scheme's stencil with reflected ghosts, 2 u_1 / h^2.
///   one_sided: (8 u_1 - u_2) / (2 h^2), exact on clamped cubics.
/// On exact nodal samples one_sided is second order and mirrored first order.
/// On solutions of the assembled system the order flips: the reflection
/// closure puts an O(h) relative error into u_1 that mirrored cancels.
enum class TraceFormula { mirrored, one_sided };

TraceFormula parse_trace_formula(const std::string& name);
std::string to_string(TraceFormula formula);

/// Laplacian of a clamped field at every node: the interior stencil plus the
/// boundary value along the inward normal. Rectangle corners get 0, which is
/// exact for clamped smooth functions.
Field clamped_laplacian(const Field& u, TraceFormula formula = TraceFormula::mirrored);

/// The clamped plate system eps^2 Delta^2 - Delta on the interior unknowns.
///
/// With Delta_h = D^{-1} S (D the control volumes, unit on Cartesian grids),
/// the matrix is D (eps^2 B - Delta_h) = eps^2 S D^{-1} S_ghost - S, where the
/// inner Laplacian is evaluated on interior and boundary nodes with mirror
/// ghosts u_{-1} = u_1 (clamped closure). `row_weights` is diag(D) restricted
/// to the unknowns; right-hand sides are multiplied by it before solving.
struct ClampedSystem {
  GridPtr grid;
  double eps = 0.0;
  SparseOperator matrix;
  Vector row_weights;

  [[nodiscard]] Vector weighted_rhs(const Vector& load) const { return row_weights.cwiseProduct(load); }
};

/// eps = 0 yields the negative Laplacian (the membrane problem).
ClampedSystem assemble_system(const GridPtr& grid, double eps);

/// Nodal samples of the load at the interior unknowns.
Vector assemble_rhs(const GridPtr& grid, const Forcing& f);

/// Boundary values of eps^2 Delta u_eps. Rectangle corners are excluded.
struct BoundaryTrace {
  std::vector<Index> nodes;
  Vector values;
  double l_minus = 0.0;
  double l_plus = 0.0;
  double m = 0.0;
};

/// Inward unit step from a boundary node, in node-index units.
NodeIJ inward_normal(const Grid& grid, Index boundary_node);

BoundaryTrace boundary_laplacian_trace(const Field& u, double eps, TraceFormula formula = TraceFormula::mirrored);
/// Extrema and M = max(L+_+, L-_-) from a list of trace values.
BoundaryTrace make_trace(std::vector<Index> nodes, Vector values);

enum class SolverKind { automatic, direct, cg_jacobi, cg_spectral };

SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

struct SolverOptions {
  SolverKind kind = SolverKind::automatic;
  double tol = kDefaultTolerance;
  int maxit = 100000;
};

struct PlateSolution {
  Field u;
  SolveReport report;
};

/// Assemble and solve the clamped plate problem (eps > 0) or the membrane
/// problem (eps = 0). `automatic` picks the banded direct solver for the
/// interval and disk and spectrally preconditioned CG on rectangles.
PlateSolution solve_plate(const GridPtr& grid, double eps, const Field& load, const SolverOptions& options = {});
PlateSolution solve_plate(const GridPtr& grid, double eps, const Forcing& f, const SolverOptions& options = {});

/// Exact inverse of eps^2 (L_h)^2 + L_h on a rectangle, L_h the 5-point
/// Dirichlet negative Laplacian, applied with fast sine transforms. It differs
/// from the clamped system only by a diagonal correction on the first
/// interior ring, which makes it a good CG preconditioner.
class SpectralPreconditioner {
 public:
  SpectralPreconditioner(const Grid& grid, double eps);
  void apply(const Vector& r, Vector& z) const;

 private:
  int mx_;  // interior nodes along x
  int my_;
  Vector inverse_eigenvalues_;
};

}  // namespace plate
