#pragma once

#include "plate/mesh.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace plate {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Compressed sparse rows with sorted column indices and no stored zeros.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(SparseMatrix m);

  [[nodiscard]] Index rows() const { return matrix_.rows(); }
  [[nodiscard]] Index nonzeros() const { return matrix_.nonZeros(); }
  [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }
  [[nodiscard]] Vector diagonal() const { return matrix_.diagonal(); }
  [[nodiscard]] Vector operator*(const Vector& x) const { return matrix_ * x; }

  /// Set once symmetry_defect() has been checked against `tol`.
  [[nodiscard]] bool symmetric() const { return symmetric_; }
  /// Verifies the defect and sets the flag; throws std::domain_error otherwise.
  void verify_symmetry(double tol = 1e-10);

 private:
  SparseMatrix matrix_;
  bool symmetric_ = false;
};

/// max over stored (i, j) of |A_ij - A_ji| / max |A|.
double symmetry_defect(const SparseOperator& a);

struct SolveReport {
  std::string method;
  int iterations = 0;
  double relative_residual = 0.0;
  double seconds = 0.0;
  /// Iterations at which the residual norm grew. CG only minimises the
  /// energy norm of the error, so this is monitored rather than asserted.
  int residual_increases = 0;
};

struct Solution {
  Vector x;
  SolveReport report;
};

/// Thrown when an iterative solve hits maxit. Carries the best iterate.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, Vector best, double residual, int iterations)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}
  [[nodiscard]] const Vector& best_iterate() const { return best_; }
  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] int iterations() const { return iterations_; }

 private:
  Vector best_;
  double residual_;
  int iterations_;
};

/// z = M^{-1} r for a symmetric positive definite M.
using Preconditioner = std::function<void(const Vector& r, Vector& z)>;

constexpr double kDefaultTolerance = 1e-10;

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Stops when ||A x - b|| / ||b|| <= tol.
Solution solve_spd(const SparseOperator& a, const Vector& b, double tol = kDefaultTolerance,
                   int maxit = 100000);

/// Same iteration with a caller-supplied preconditioner.
Solution solve_pcg(const SparseOperator& a, const Vector& b, const Preconditioner& precond,
                   const std::string& name, double tol = kDefaultTolerance, int maxit = 100000);

/// Half bandwidth max |i - j| over stored entries.
Index bandwidth(const SparseOperator& a);

/// Banded LDL^T factorisation and solve. Throws std::domain_error on a zero
/// or negative pivot, which signals a non-SPD assembly.
Vector solve_banded_direct(const SparseOperator& a, const Vector& b);

/// One `row col value` triplet per line, 0-based indices.
void write_coo(std::ostream& os, const SparseOperator& a);

}  // namespace plate
