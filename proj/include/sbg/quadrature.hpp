#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <limits>

namespace sbg {

inline constexpr double kQuadRelTol = 1e-10;

/// Adaptive Gauss-Kronrod integration on [a, b] to relative tolerance tol.
template <typename F>
double integrate(F&& f, double a, double b, double tol = kQuadRelTol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

/// Adaptive Gauss-Kronrod on [a, inf).
template <typename F>
double integrate_to_inf(F&& f, double a, double tol = kQuadRelTol) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(
      f, a, std::numeric_limits<double>::infinity(), 12, tol);
}

}  // namespace sbg
