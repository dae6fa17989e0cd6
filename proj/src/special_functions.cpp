#include "special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace fadesim {
namespace {

// Below the seam the power series converges with all-positive terms; above it the
// asymptotic series' smallest term is under 1e-13 relative.
constexpr double kSeam = 17.0;

void require_nonneg(double x, const char* fn) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError(std::string(fn) + ": argument must be finite and >= 0, got " + std::to_string(x));
  }
}

// I_nu(x) for nu in {0, 1} by power series (unscaled).
double series_i(int nu, double x) {
  const double q = 0.25 * x * x;
  double term = nu == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (double(m) * double(m + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// e^{-x} I_nu(x) by the large-argument expansion, truncated at its smallest term.
double asymptotic_i_scaled(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::fabs(term);
    if (mag > prev) break;
    sum += term;
    if (mag < 1e-17 * std::fabs(sum)) break;
    prev = mag;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  require_nonneg(x, "bessel_i0_scaled");
  if (x < kSeam) return series_i(0, x) * std::exp(-x);
  return asymptotic_i_scaled(0, x);
}

double bessel_i1_scaled(double x) {
  require_nonneg(x, "bessel_i1_scaled");
  if (x < kSeam) return series_i(1, x) * std::exp(-x);
  return asymptotic_i_scaled(1, x);
}

double bessel_ratio_i1_i0(double x) {
  if (!std::isfinite(x)) throw DomainError("bessel_ratio_i1_i0: argument must be finite");
  const double ax = std::fabs(x);
  const double r = bessel_i1_scaled(ax) / bessel_i0_scaled(ax);
  return x < 0.0 ? -r : r;
}

double bessel_i_neg_half_scaled(double x) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("bessel_i_neg_half_scaled: argument must be finite and > 0");
  }
  // e^{-x} cosh(x) = (1 + e^{-2x}) / 2
  return std::sqrt(2.0 / (std::numbers::pi * x)) * 0.5 * (1.0 + std::exp(-2.0 * x));
}

double log_bessel_i0(double x) {
  const double ax = std::fabs(x);
  if (ax < 2.0) {
    // log1p of the series tail; log(e^-x I0) + x cancels here
    const double q = 0.25 * ax * ax;
    double term = 1.0, tail = 0.0;
    for (int m = 1; m < 60; ++m) {
      term *= q / (double(m) * m);
      tail += term;
      if (term < 1e-17 * tail) break;
    }
    return std::log1p(tail);
  }
  return std::log(bessel_i0_scaled(ax)) + ax;
}

}  // namespace fadesim
