#pragma once

#include <string>

namespace fadesim {

struct OuParams {
  double k1 = 1.0, k2 = 1.0;
  double theta1 = 0.0, theta2 = 0.0;
  double beta1 = 1.0, beta2 = 1.0;
  double i0 = 0.0, q0 = 0.0;
};

// dR = B(sigma^2 - R) ds + sigma sqrt(2BR) dW, the square envelope of a symmetric
// zero-mean OU pair with k = B/2 and beta = sqrt(B/2) sigma.
struct RayleighParams {
  double B = 1.0;
  double sigma = 1.0;
  double i0 = 0.0, q0 = 0.0;
};

OuParams to_ou(const RayleighParams& p);

// Throws ConfigError listing every invalid field.
void validate(const OuParams& p);
void validate(const RayleighParams& p);

enum class FadingKind { Rayleigh, Rice, Hoyt, Beckmann };

const char* to_string(FadingKind k);

struct FadingClass {
  FadingKind kind = FadingKind::Rayleigh;
  double scale = 0.0;        // Rayleigh/Rice: per-component std beta/sqrt(2k)
  double nu = 0.0;           // Rice: |(theta1, theta2)|
  double q = 0.0;            // Hoyt: (beta2/beta1) sqrt(k1/k2)
  double mean_square = 0.0;  // Hoyt: beta1^2/(2k1) + beta2^2/(2k2)
};

FadingClass classify_fading(const OuParams& p);

enum class Component { I, Q };

struct Moments {
  double mean;
  double variance;
};

Moments transient_moments(const OuParams& p, double s, Component c);

// Cov(I(s), I(s + ds)) for one component started from a deterministic level.
double iq_autocovariance(const OuParams& p, double s, double ds, Component c);

// Cov(R(t), R(t + dt)) for the Rayleigh square envelope started at r0.
double rbar_autocovariance(const RayleighParams& p, double t, double dt, double r0);

// E[R(t)] for the Rayleigh square envelope.
double rbar_mean(const RayleighParams& p, double t, double r0);

}  // namespace fadesim
