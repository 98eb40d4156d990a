#include "plate/operators.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace plate {

namespace {

/// Orthonormal DST-I of length n, computed through a real FFT of the odd
/// extension (length 2n + 2). The transform is its own inverse.
class SineTransform {
 public:
  explicit SineTransform(int n) : n_(n), scale_(std::sqrt(2.0 / (n + 1))), ext_(std::size_t(2 * (n + 1)), 0.0) {
    fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  }

  /// In place on `n` values separated by `stride`.
  void operator()(double* data, Index stride) {
    const int m = 2 * (n_ + 1);
    ext_[0] = 0.0;
    ext_[std::size_t(n_ + 1)] = 0.0;
    for (int k = 1; k <= n_; ++k) {
      const double v = data[(k - 1) * stride];
      ext_[std::size_t(k)] = v;
      ext_[std::size_t(m - k)] = -v;
    }
    fft_.fwd(spec_, ext_);
    for (int k = 1; k <= n_; ++k) data[(k - 1) * stride] = -0.5 * scale_ * spec_[std::size_t(k)].imag();
  }

 private:
  int n_;
  double scale_;
  std::vector<double> ext_;
  std::vector<std::complex<double>> spec_;
  Eigen::FFT<double> fft_;
};

using RowMajorGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Rows are contiguous in both passes; the y pass runs on the transpose.
void transform_2d(Vector& v, int mx, int my) {
  Eigen::Map<RowMajorGrid> rows(v.data(), my, mx);
  SineTransform along_x(mx);
  for (int j = 0; j < my; ++j) along_x(rows.row(j).data(), 1);
  RowMajorGrid t = rows.transpose();
  SineTransform along_y(my);
  for (int i = 0; i < mx; ++i) along_y(t.row(i).data(), 1);
  rows = t.transpose();
}

/// Eigenvalues of the 1D Dirichlet negative Laplacian (n interior nodes).
Vector dirichlet_eigenvalues(int n, double h) {
  Vector lam(n);
  for (int k = 1; k <= n; ++k) {
    const double s = std::sin(std::numbers::pi * k / (2.0 * (n + 1)));
    lam[k - 1] = 4.0 * s * s / (h * h);
  }
  return lam;
}

}  // namespace

SpectralPreconditioner::SpectralPreconditioner(const Grid& grid, double eps)
    : mx_(grid.nx() - 1), my_(grid.ny() - 1) {
  if (!grid.domain().is_planar()) throw ConfigError("spectral preconditioner requires a rectangle");
  const Vector lx = dirichlet_eigenvalues(mx_, grid.h());
  const Vector ly = dirichlet_eigenvalues(my_, grid.h());
  inverse_eigenvalues_.resize(Index(mx_) * my_);
  for (int j = 0; j < my_; ++j)
    for (int i = 0; i < mx_; ++i) {
      const double mu = lx[i] + ly[j];
      inverse_eigenvalues_[Index(j) * mx_ + i] = 1.0 / (eps * eps * mu * mu + mu);
    }
}

void SpectralPreconditioner::apply(const Vector& r, Vector& z) const {
  z = r;
  transform_2d(z, mx_, my_);
  z.array() *= inverse_eigenvalues_.array();
  transform_2d(z, mx_, my_);
}

}  // namespace plate
