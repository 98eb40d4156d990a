#pragma once

// Closed-form reference solutions: the fourth-order ODE basis, 1D clamped
// solutions, radial disk solutions through scaled modified Bessel functions,
// and the half-space boundary-layer profile.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace plate::exact {

/// Fundamental system of v'''' - v'' = 0 at t, plus the two members that
/// satisfy v(0) = v'(0) = 0.
template <typename Scalar>
struct OdeBasis {
  Scalar cosh_t;
  Scalar sinh_t;
  Scalar one;
  Scalar t;
  Scalar v1;  // cosh t - 1
  Scalar v2;  // sinh t - t
};

template <typename Scalar>
Scalar ode_overflow_threshold() {
  using std::log;
  return log(std::numeric_limits<Scalar>::max());
}

template <typename Scalar>
OdeBasis<Scalar> ode_basis(Scalar t) {
  using std::abs, std::cosh, std::sinh;
  if (!(abs(t) <= ode_overflow_threshold<Scalar>())) throw std::range_error("ode_basis: |t| beyond overflow threshold");
  OdeBasis<Scalar> b{cosh(t), sinh(t), Scalar(1), t, Scalar(0), Scalar(0)};
  const Scalar half = sinh(t / 2);
  b.v1 = 2 * half * half;
  if (abs(t) < Scalar(0.5)) {
    // sinh t - t = sum_{k>=1} t^{2k+1} / (2k+1)!
    Scalar term = t * t * t / 6;
    Scalar sum = 0;
    for (int k = 1; k < 30 && term != Scalar(0); ++k) {
      sum += term;
      term *= t * t / Scalar((2 * k + 2) * (2 * k + 3));
    }
    b.v2 = sum;
  } else {
    b.v2 = b.sinh_t - t;
  }
  return b;
}

namespace detail {

template <typename Scalar>
Scalar bessel_scaled_series(int nu, Scalar x) {
  using std::exp;
  const Scalar q = x * x / 4;
  Scalar term = nu == 0 ? Scalar(1) : x / 2;
  Scalar sum = 0;
  for (int k = 0; k < 500; ++k) {
    sum += term;
    if (term < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2) * sum) break;
    term *= q / Scalar((k + 1) * (k + 1 + nu));
  }
  return exp(-x) * sum;
}

template <typename Scalar>
Scalar bessel_scaled_asymptotic(int nu, Scalar x) {
  using std::abs, std::sqrt;
  const Scalar mu = Scalar(4 * nu * nu);
  const Scalar pi = Scalar(3.141592653589793238462643383279502884L);
  Scalar term = 1;
  Scalar sum = 1;
  for (int k = 1; k < 60; ++k) {
    const Scalar odd = Scalar(2 * k - 1);
    const Scalar next = -term * (mu - odd * odd) / (Scalar(8 * k) * x);
    if (abs(next) >= abs(term)) break;  // asymptotic series starts to diverge
    term = next;
    sum += term;
    if (abs(term) < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2)) break;
  }
  return sum / sqrt(2 * pi * x);
}

/// Crossover between the power series and the large-argument expansion. The
/// expansion drops an e^{-2x} relative term, so it is only used once that is
/// far below 1e-10.
template <typename Scalar>
constexpr Scalar bessel_crossover() {
  return Scalar(20);
}

template <typename Scalar>
Scalar bessel_scaled(int nu, Scalar x) {
  if (!(x >= Scalar(0))) throw std::domain_error("scaled Bessel I requires x >= 0");
  if (x <= bessel_crossover<Scalar>()) return bessel_scaled_series(nu, x);
  return bessel_scaled_asymptotic(nu, x);
}

}  // namespace detail

/// e^{-x} I_0(x) for x >= 0.
template <typename Scalar>
Scalar bessel_i0_scaled(Scalar x) {
  return detail::bessel_scaled(0, x);
}

/// e^{-x} I_1(x) for x >= 0.
template <typename Scalar>
Scalar bessel_i1_scaled(Scalar x) {
  return detail::bessel_scaled(1, x);
}

/// beta (e^{-t} - 1 + t): the bounded-deviation solution of the half-space
/// problem with slope beta at infinity. Second derivative at 0 equals beta.
template <typename Scalar>
struct HalfspaceProfile {
  Scalar beta = 0;

  Scalar value(Scalar t) const {
    using std::expm1;
    return beta * (expm1(-t) + t);
  }
  Scalar derivative(Scalar t) const {
    using std::expm1;
    return -beta * expm1(-t);
  }
  Scalar second_derivative(Scalar t) const {
    using std::exp;
    return beta * exp(-t);
  }
};

template <typename Scalar>
Scalar halfspace_profile(Scalar beta, Scalar t) {
  if (!(t >= Scalar(0))) throw std::domain_error("halfspace_profile requires t >= 0");
  return HalfspaceProfile<Scalar>{beta}.value(t);
}

/// v(t) = 1 - cos t, a bounded clamped solution of v'''' + v'' = 0.
template <typename Scalar>
Scalar wrong_sign_solution(Scalar t) {
  using std::cos;
  return 1 - cos(t);
}

/// v'''' + v'' for v = 1 - cos t, evaluated term by term.
template <typename Scalar>
Scalar wrong_sign_residual(Scalar t) {
  using std::cos;
  const Scalar fourth = -cos(t);
  const Scalar second = cos(t);
  return fourth + second;
}

/// Clamped solution of eps^2 u'''' - u'' = amp on (0, L), written as
///   u = a + b x + eps c e^{-x/eps} + eps d e^{-(L-x)/eps} - amp x^2 / 2,
/// which spans the same space as {1, x, cosh(x/eps), sinh(x/eps)} without
/// overflowing for small eps.
class OneDimSolution {
 public:
  OneDimSolution(double length, double eps, double amp);

  [[nodiscard]] double length() const { return length_; }
  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] double amp() const { return amp_; }
  [[nodiscard]] const Eigen::Vector4d& coefficients() const { return coef_; }

  [[nodiscard]] double u(double x) const;
  [[nodiscard]] double du(double x) const;
  [[nodiscard]] double d2u(double x) const;

 private:
  double length_;
  double eps_;
  double amp_;
  Eigen::Vector4d coef_;
};

OneDimSolution solve_exact_1d(double length, double eps, double amp);

/// Radial clamped solution on the disk of radius R for a constant load:
///   u(r) = B - amp r^2 / 4 + A eps^2 I_0(r / eps),
/// stored through A I_0(r/eps) = k e^{(r-R)/eps} e^{-r/eps} I_0(r/eps) so that
/// nothing overflows for eps down to 1e-3.
class RadialSolution {
 public:
  RadialSolution(double radius, double eps, double amp);

  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] double eps() const { return eps_; }

  [[nodiscard]] double u(double r) const;
  [[nodiscard]] double du(double r) const;
  [[nodiscard]] double d2u(double r) const;
  [[nodiscard]] double laplacian(double r) const;

 private:
  double radius_;
  double eps_;
  double amp_;
  double k_;  // A e^{R/eps}
};

RadialSolution solve_exact_radial(double radius, double eps, double amp);

}  // namespace plate::exact
