#pragma once

#include <functional>

namespace ltrawl {

struct QuadratureResult {
  double value;
  double error;
};

// Adaptive Gauss-Kronrod (21 point, with extrapolation) on [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol = 0.0);

// Integral over [a, inf) through the substitution x = a + t / (1 - t).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                       double abs_tol, double rel_tol = 0.0);

// Iterated adaptive quadrature over [a, inf) x [c, inf), both axes mapped to
// the unit interval.
QuadratureResult integrate_quadrant(const std::function<double(double, double)>& f, double a,
                                    double c, double abs_tol);

}  // namespace ltrawl
