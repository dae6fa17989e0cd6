#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "errors.hpp"

namespace fadesim {

// Adaptive Gauss-Kronrod on [a, b]; throws NumericalError when the error estimate
// stays above abs_tol.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, const char* what) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12, &err);
  if (!std::isfinite(v) || err > abs_tol) {
    throw NumericalError(std::string(what) + ": quadrature did not converge (estimate " + std::to_string(v) +
                         ", error " + std::to_string(err) + ", tolerance " + std::to_string(abs_tol) + ")");
  }
  return v;
}

}  // namespace fadesim
