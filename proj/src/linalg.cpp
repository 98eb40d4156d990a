#include "plate/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace plate {

SparseOperator::SparseOperator(SparseMatrix m) : matrix_(std::move(m)) {
  matrix_.prune(0.0);
  matrix_.makeCompressed();
}

void SparseOperator::verify_symmetry(double tol) {
  const double defect = symmetry_defect(*this);
  if (!(defect <= tol)) {
    std::ostringstream msg;
    msg << "operator is not symmetric: defect " << defect << " > " << tol;
    throw std::domain_error(msg.str());
  }
  symmetric_ = true;
}

double symmetry_defect(const SparseOperator& a) {
  const SparseMatrix& m = a.matrix();
  double scale = 0.0;
  for (int k = 0; k < m.nonZeros(); ++k) scale = std::max(scale, std::abs(m.valuePtr()[k]));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (Index i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it)
      if (it.col() > i) worst = std::max(worst, std::abs(it.value() - m.coeff(it.col(), i)));
  // Entries present only below the diagonal are caught from the other side.
  for (Index i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it)
      if (it.col() < i && m.coeff(it.col(), i) == 0.0) worst = std::max(worst, std::abs(it.value()));
  return worst / scale;
}

namespace {

Solution conjugate_gradients(const SparseOperator& a, const Vector& b, const Preconditioner& precond,
                             const std::string& name, double tol, int maxit) {
  if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (b.size() != a.rows()) throw std::invalid_argument("right-hand side has wrong size");
  if (!a.symmetric() && symmetry_defect(a) > 1e-10)
    throw std::domain_error("conjugate gradients requires a symmetric operator");

  const auto start = std::chrono::steady_clock::now();
  Solution out;
  out.report.method = name;
  out.x = Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return out;

  Vector r = b;
  Vector z(b.size());
  precond(r, z);
  Vector p = z;
  Vector ap(b.size());
  double rz = r.dot(z);
  double res = 1.0;
  double best_res = 1.0;
  Vector best = out.x;

  int it = 0;
  while (res > tol && it < maxit) {
    ap.noalias() = a.matrix() * p;
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw std::domain_error("conjugate gradients met a non-positive curvature direction");
    const double alpha = rz / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    ++it;
    const double next = r.norm() / bnorm;
    if (next > res) ++out.report.residual_increases;
    res = next;
    if (res < best_res) {
      best_res = res;
      best = out.x;
    }
    if (res <= tol) break;
    precond(r, z);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }

  out.report.iterations = it;
  out.report.relative_residual = res;
  out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res > tol) {
    std::ostringstream msg;
    msg << name << ": no convergence after " << it << " iterations (relative residual " << res << ")";
    throw SolveError(msg.str(), best, best_res, it);
  }
  return out;
}

}  // namespace

Solution solve_spd(const SparseOperator& a, const Vector& b, double tol, int maxit) {
  const Vector inv_diag = a.diagonal().cwiseInverse();
  if (!inv_diag.allFinite()) throw std::domain_error("Jacobi preconditioner needs a nonzero diagonal");
  return conjugate_gradients(
      a, b, [&](const Vector& r, Vector& z) { z = inv_diag.cwiseProduct(r); }, "cg-jacobi", tol, maxit);
}

Solution solve_pcg(const SparseOperator& a, const Vector& b, const Preconditioner& precond,
                   const std::string& name, double tol, int maxit) {
  return conjugate_gradients(a, b, precond, name, tol, maxit);
}

Index bandwidth(const SparseOperator& a) {
  const SparseMatrix& m = a.matrix();
  Index bw = 0;
  for (Index i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) bw = std::max(bw, std::abs(Index(it.col()) - i));
  return bw;
}

Vector solve_banded_direct(const SparseOperator& a, const Vector& b) {
  const Index n = a.rows();
  if (b.size() != n) throw std::invalid_argument("right-hand side has wrong size");
  const Index p = bandwidth(a);
  const SparseMatrix& m = a.matrix();

  // band(i, q) holds L(i, i - p + q); the last column holds the pivots d_i.
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(n, p + 1);
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it)
      if (it.col() <= i) band(i, p - (i - it.col())) = it.value();

  auto lower = [&](Index i, Index j) -> double& { return band(i, p - (i - j)); };
  for (Index j = 0; j < n; ++j) {
    const Index k0 = std::max<Index>(0, j - p);
    double d = lower(j, j);
    for (Index k = k0; k < j; ++k) d -= lower(j, k) * lower(j, k) * band(k, p);
    if (!(d > 0.0)) {
      std::ostringstream msg;
      msg << "zero or negative pivot at row " << j << " in banded factorisation";
      throw std::domain_error(msg.str());
    }
    band(j, p) = d;
    for (Index i = j + 1; i <= std::min(n - 1, j + p); ++i) {
      double s = lower(i, j);
      for (Index k = std::max<Index>(0, i - p); k < j; ++k) s -= lower(i, k) * lower(j, k) * band(k, p);
      lower(i, j) = s / d;
    }
  }

  Vector x = b;
  for (Index i = 0; i < n; ++i)
    for (Index k = std::max<Index>(0, i - p); k < i; ++k) x[i] -= lower(i, k) * x[k];
  for (Index i = 0; i < n; ++i) x[i] /= band(i, p);
  for (Index i = n - 1; i >= 0; --i)
    for (Index k = i + 1; k <= std::min(n - 1, i + p); ++k) x[i] -= lower(k, i) * x[k];
  return x;
}

void write_coo(std::ostream& os, const SparseOperator& a) {
  const SparseMatrix& m = a.matrix();
  char buf[80];
  for (Index i = 0; i < m.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %d %.17g\n", static_cast<long long>(i), static_cast<int>(it.col()), it.value());
      os << buf;
    }
}

}  // namespace plate
