#include "ou_channel.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fadesim {
namespace {

void throw_if_any(const std::vector<std::string>& errs) {
  if (errs.empty()) return;
  std::string msg;
  for (const auto& e : errs) {
    if (!msg.empty()) msg += "; ";
    msg += e;
  }
  throw ConfigError(msg);
}

void check_positive(std::vector<std::string>& errs, const char* name, double v) {
  if (!std::isfinite(v) || v <= 0.0) errs.push_back(std::string(name) + " must be > 0");
}

void check_finite(std::vector<std::string>& errs, const char* name, double v) {
  if (!std::isfinite(v)) errs.push_back(std::string(name) + " must be finite");
}

struct Coeffs {
  double k, theta, beta, x0;
};

Coeffs component(const OuParams& p, Component c) {
  if (c == Component::I) return {p.k1, p.theta1, p.beta1, p.i0};
  return {p.k2, p.theta2, p.beta2, p.q0};
}

}  // namespace

OuParams to_ou(const RayleighParams& p) {
  OuParams o;
  o.k1 = o.k2 = 0.5 * p.B;
  o.beta1 = o.beta2 = std::sqrt(0.5 * p.B) * p.sigma;
  o.theta1 = o.theta2 = 0.0;
  o.i0 = p.i0;
  o.q0 = p.q0;
  return o;
}

void validate(const OuParams& p) {
  std::vector<std::string> errs;
  check_positive(errs, "k1", p.k1);
  check_positive(errs, "k2", p.k2);
  check_positive(errs, "beta1", p.beta1);
  check_positive(errs, "beta2", p.beta2);
  check_finite(errs, "theta1", p.theta1);
  check_finite(errs, "theta2", p.theta2);
  check_finite(errs, "i0", p.i0);
  check_finite(errs, "q0", p.q0);
  throw_if_any(errs);
}

void validate(const RayleighParams& p) {
  std::vector<std::string> errs;
  check_positive(errs, "B", p.B);
  check_positive(errs, "sigma", p.sigma);
  check_finite(errs, "i0", p.i0);
  check_finite(errs, "q0", p.q0);
  throw_if_any(errs);
}

const char* to_string(FadingKind k) {
  switch (k) {
    case FadingKind::Rayleigh: return "rayleigh";
    case FadingKind::Rice: return "rice";
    case FadingKind::Hoyt: return "hoyt";
    case FadingKind::Beckmann: return "beckmann";
  }
  return "unknown";
}

FadingClass classify_fading(const OuParams& p) {
  validate(p);
  FadingClass fc;
  const bool zero_mean = p.theta1 == 0.0 && p.theta2 == 0.0;
  const bool symmetric = p.k1 == p.k2 && p.beta1 == p.beta2;
  if (zero_mean && symmetric) {
    fc.kind = FadingKind::Rayleigh;
    fc.scale = p.beta1 / std::sqrt(2.0 * p.k1);
  } else if (symmetric) {
    fc.kind = FadingKind::Rice;
    fc.nu = std::hypot(p.theta1, p.theta2);
    fc.scale = p.beta1 / std::sqrt(2.0 * p.k1);
  } else if (zero_mean) {
    fc.kind = FadingKind::Hoyt;
    fc.q = (p.beta2 / p.beta1) * std::sqrt(p.k1 / p.k2);
    fc.mean_square = p.beta1 * p.beta1 / (2.0 * p.k1) + p.beta2 * p.beta2 / (2.0 * p.k2);
  } else {
    fc.kind = FadingKind::Beckmann;
  }
  return fc;
}

Moments transient_moments(const OuParams& p, double s, Component c) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("transient_moments: s must be >= 0");
  const auto [k, theta, beta, x0] = component(p, c);
  const double decay = std::exp(-k * s);
  // -expm1 keeps the variance accurate for small k*s
  const double var = beta * beta / (2.0 * k) * -std::expm1(-2.0 * k * s);
  return {x0 * decay + theta * -std::expm1(-k * s), var};
}

double iq_autocovariance(const OuParams& p, double s, double ds, Component c) {
  if (!(s >= 0.0) || !(ds >= 0.0)) throw DomainError("iq_autocovariance: s and ds must be >= 0");
  const auto [k, theta, beta, x0] = component(p, c);
  (void)theta;
  (void)x0;
  return beta * beta / (2.0 * k) * std::exp(-k * ds) * -std::expm1(-2.0 * k * s);
}

double rbar_autocovariance(const RayleighParams& p, double t, double dt, double r0) {
  if (!(t >= 0.0) || !(dt >= 0.0) || !(r0 >= 0.0)) {
    throw DomainError("rbar_autocovariance: t, dt, r0 must be >= 0");
  }
  const double s2 = p.sigma * p.sigma;
  const double e1 = std::exp(-p.B * t);
  const double e2 = e1 * e1;
  return s2 * std::exp(-p.B * dt) * (2.0 * (r0 - s2) * (e1 - e2) + s2 * -std::expm1(-2.0 * p.B * t));
}

double rbar_mean(const RayleighParams& p, double t, double r0) {
  if (!(t >= 0.0)) throw DomainError("rbar_mean: t must be >= 0");
  const double s2 = p.sigma * p.sigma;
  return r0 * std::exp(-p.B * t) + s2 * -std::expm1(-p.B * t);
}

}  // namespace fadesim
