#pragma once

#include <functional>
#include <span>

namespace ellab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod integral of fn over [a, b], split at every
// breakpoint strictly inside (a, b). Throws NumericError when the summed
// error estimate exceeds max(abs_tol, rel_tol * L1) plus a rounding allowance
// proportional to the L1 norm of the integrand.
QuadratureResult integrate(const std::function<double(double)>& fn, double a, double b,
                           std::span<const double> breakpoints = {},
                           double abs_tol = 1e-12, double rel_tol = 0.0);

}  // namespace ellab
