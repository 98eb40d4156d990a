#include "plate/exact.hpp"

#include <Eigen/LU>

#include <cmath>

namespace plate::exact {

OneDimSolution::OneDimSolution(double length, double eps, double amp)
    : length_(length), eps_(eps), amp_(amp), coef_(Eigen::Vector4d::Zero()) {
  if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(amp >= 0.0)) throw std::invalid_argument("amp must be >= 0");
  if (amp == 0.0) return;

  const double q = std::exp(-length / eps);
  Eigen::Matrix4d m;
  // rows: u(0), u'(0), u(L), u'(L); columns: a, b, c, d
  m << 1.0, 0.0, eps, eps * q,
       0.0, 1.0, -1.0, q,
       1.0, length, eps * q, eps,
       0.0, 1.0, -q, 1.0;
  const Eigen::Vector4d rhs(0.0, 0.0, 0.5 * amp * length * length, amp * length);
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  if (lu.rank() < 4) throw std::logic_error("clamped 1D system is singular");
  coef_ = lu.solve(rhs);
}

double OneDimSolution::u(double x) const {
  const double e0 = std::exp(-x / eps_);
  const double e1 = std::exp(-(length_ - x) / eps_);
  return coef_[0] + coef_[1] * x + eps_ * (coef_[2] * e0 + coef_[3] * e1) - 0.5 * amp_ * x * x;
}

double OneDimSolution::du(double x) const {
  const double e0 = std::exp(-x / eps_);
  const double e1 = std::exp(-(length_ - x) / eps_);
  return coef_[1] - coef_[2] * e0 + coef_[3] * e1 - amp_ * x;
}

double OneDimSolution::d2u(double x) const {
  const double e0 = std::exp(-x / eps_);
  const double e1 = std::exp(-(length_ - x) / eps_);
  return (coef_[2] * e0 + coef_[3] * e1) / eps_ - amp_;
}

OneDimSolution solve_exact_1d(double length, double eps, double amp) { return {length, eps, amp}; }

RadialSolution::RadialSolution(double radius, double eps, double amp)
    : radius_(radius), eps_(eps), amp_(amp), k_(0.0) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(amp >= 0.0)) throw std::invalid_argument("amp must be >= 0");
  // u'(R) = 0 gives A = amp R / (2 eps I_1(R/eps)).
  k_ = amp * radius / (2.0 * eps * bessel_i1_scaled(radius / eps));
}

double RadialSolution::u(double r) const {
  const double z = radius_ / eps_;
  const double inner = bessel_i0_scaled(r / eps_) * std::exp((r - radius_) / eps_);
  return 0.25 * amp_ * (radius_ * radius_ - r * r) - eps_ * eps_ * k_ * (bessel_i0_scaled(z) - inner);
}

double RadialSolution::du(double r) const {
  return -0.5 * amp_ * r + eps_ * k_ * bessel_i1_scaled(r / eps_) * std::exp((r - radius_) / eps_);
}

double RadialSolution::laplacian(double r) const {
  return -amp_ + k_ * bessel_i0_scaled(r / eps_) * std::exp((r - radius_) / eps_);
}

double RadialSolution::d2u(double r) const {
  if (r == 0.0) return 0.5 * laplacian(0.0);
  return laplacian(r) - du(r) / r;
}

RadialSolution solve_exact_radial(double radius, double eps, double amp) { return {radius, eps, amp}; }

}  // namespace plate::exact
