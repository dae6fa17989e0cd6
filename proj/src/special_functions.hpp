#pragma once

namespace fadesim {

// All values are exponentially scaled: f(x) = e^{-x} I_nu(x).
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);
double bessel_i_neg_half_scaled(double x);

// I1(x)/I0(x) for any finite x; odd, in (-1, 1).
double bessel_ratio_i1_i0(double x);

// log I0(|x|), safe for large arguments.
double log_bessel_i0(double x);

}  // namespace fadesim
