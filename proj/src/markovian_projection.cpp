#include "markovian_projection.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special_functions.hpp"

namespace fadesim {
namespace {

constexpr double kPi = std::numbers::pi;

void require_r(double r, const char* fn) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError(std::string(fn) + ": r must be finite and >= 0");
}

// log cosh(y) without overflow.
double log_cosh(double y) {
  const double a = std::fabs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// E[I | R = r] where the conditional law depends only on kappa = m / sigma^2.
// With x = sqrt(r) sin u the density times dx is smooth on (-pi/2, pi/2):
//   e^{a sin u} cosh(a cos u) / (pi I0(sqrt2 a)) du,   a = kappa sqrt(r).
double rice_exact_from_kappa(double kappa, double r) {
  if (r == 0.0 || kappa == 0.0) return 0.0;
  const double sr = std::sqrt(r);
  const double a = kappa * sr;
  const double shift = std::numbers::sqrt2 * std::fabs(a);
  const double norm = 2.0 * kPi * bessel_i0_scaled(shift);
  auto f = [&](double u) {
    const double su = std::sin(u), cu = std::cos(u);
    return sr * su * (std::exp(a * (su + cu) - shift) + std::exp(a * (su - cu) - shift)) / norm;
  };
  return integrate(f, -0.5 * kPi, 0.5 * kPi, 1e-8, "rice_cond_exp");
}

double rice_affine(double m, double sigv, double r) {
  if (m == 0.0) return 0.0;
  // m + m*sigv*(r - 2(sigv + m^2)) / (4 m^2 sigv + 2 sigv^2), with sigv cancelled so
  // the s = 0 limit (sigv = 0) stays finite.
  return m + m * (r - 2.0 * sigv - 2.0 * m * m) / (2.0 * (2.0 * m * m + sigv));
}

void check_rice_symmetry(const OuParams& p) {
  std::string bad;
  if (p.k1 != p.k2) bad += " k1 != k2;";
  if (p.beta1 != p.beta2) bad += " beta1 != beta2;";
  if (p.theta1 != p.theta2) bad += " theta1 != theta2;";
  if (p.i0 != p.q0) bad += " i0 != q0 (Rice projection assumes equal initial components);";
  if (!bad.empty()) throw ConfigError("rice model requires symmetric components:" + bad);
}

void check_hoyt_preconditions(const OuParams& p) {
  std::string bad;
  if (p.theta1 != 0.0 || p.theta2 != 0.0) bad += " theta1 = theta2 = 0 required;";
  if (p.i0 != 0.0 || p.q0 != 0.0) bad += " i0 = q0 = 0 required;";
  if (!bad.empty()) throw ConfigError("hoyt model:" + bad);
}

// Rice drift/diffusion given the transient moments of one component.
Coeffs rice_from_moments(const OuParams& p, double m, double sigv, double r, RiceMode mode) {
  const double k = p.k1, theta = p.theta1, beta = p.beta1;
  double e = 0.0;
  if (r > 0.0) {
    if (sigv > 0.0) {
      e = rice_cond_exp(m, sigv, r, mode);
    } else if (m != 0.0) {
      // s = 0: I = i0 deterministically
      e = mode == RiceMode::Affine ? rice_affine(m, 0.0, r) : std::copysign(std::sqrt(0.5 * r), m);
    } else {
      // s -> 0 with i0 = 0: m/sigma^2 -> k theta / beta^2
      const double kappa = k * theta / (beta * beta);
      e = mode == RiceMode::Affine ? 0.5 * kappa * r : rice_exact_from_kappa(kappa, r);
    }
  }
  return {4.0 * k * theta * e - 2.0 * k * r + 2.0 * beta * beta, 2.0 * beta * std::sqrt(r)};
}

Coeffs hoyt_from_variances(const OuParams& p, double s1v, double s2v, double r) {
  const double b2 = p.beta1 * p.beta1 + p.beta2 * p.beta2;
  if (r == 0.0) return {b2, 0.0};
  HoytExps e;
  if (s1v > 0.0 && s2v > 0.0) {
    e = hoyt_cond_exps(s1v, s2v, r);
  } else {
    // s -> 0: sigma_i^2 ~ beta_i^2 s, so the Bessel argument diverges with the sign of d
    const double d = 1.0 / (p.beta2 * p.beta2) - 1.0 / (p.beta1 * p.beta1);
    const double rho = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    e = {0.5 * r * (1.0 + rho), 0.5 * r * (1.0 - rho)};
  }
  const double drift = -2.0 * p.k1 * e.eI2 - 2.0 * p.k2 * e.eQ2 + b2;
  const double diff2 = 4.0 * p.beta1 * p.beta1 * e.eI2 + 4.0 * p.beta2 * p.beta2 * e.eQ2;
  return {drift, std::sqrt(std::max(diff2, 0.0))};
}

}  // namespace

Coeffs rayleigh_coeffs(double B, double sigma, double s, double r) {
  (void)s;
  require_r(r, "rayleigh_coeffs");
  return {B * (sigma * sigma - r), sigma * std::sqrt(2.0 * B * r)};
}

double rayleigh_stationary_pdf(double sigma, double y) {
  if (y < 0.0) return 0.0;
  const double s2 = sigma * sigma;
  return std::exp(-y / s2) / s2;
}

double rice_cond_pdf(double m, double sigv, double r, double x) {
  if (!(sigv > 0.0)) throw DomainError("rice_cond_pdf: sigv must be > 0");
  const double gap = r - x * x;
  if (!(gap > 0.0)) return 0.0;
  const double kappa = m / sigv;
  const double log_f = x * kappa + log_cosh(kappa * std::sqrt(gap)) - std::log(kPi) - 0.5 * std::log(gap) -
                       log_bessel_i0(kappa * std::sqrt(2.0 * r));
  return std::exp(log_f);
}

double rice_cond_exp(double m, double sigv, double r, RiceMode mode) {
  require_r(r, "rice_cond_exp");
  if (mode == RiceMode::Affine) {
    if (sigv < 0.0) throw DomainError("rice_cond_exp: sigv must be >= 0");
    return rice_affine(m, sigv, r);
  }
  if (!(sigv > 0.0)) throw DomainError("rice_cond_exp: sigv must be > 0");
  return rice_exact_from_kappa(m / sigv, r);
}

Coeffs rice_coeffs(const OuParams& p, double s, double r, RiceMode mode) {
  check_rice_symmetry(p);
  require_r(r, "rice_coeffs");
  const Moments mo = transient_moments(p, s, Component::I);
  return rice_from_moments(p, mo.mean, mo.variance, r, mode);
}

HoytExps hoyt_cond_exps(double s1v, double s2v, double r) {
  if (!(s1v > 0.0) || !(s2v > 0.0)) throw DomainError("hoyt_cond_exps: variances must be > 0");
  require_r(r, "hoyt_cond_exps");
  const double a = 0.25 * r * (1.0 / s2v - 1.0 / s1v);
  const double rho = bessel_ratio_i1_i0(a);
  return {0.5 * r * (1.0 + rho), 0.5 * r * (1.0 - rho)};
}

double hoyt_cond_pdf(double s1v, double s2v, double r, double x) {
  if (!(s1v > 0.0) || !(s2v > 0.0)) throw DomainError("hoyt_cond_pdf: variances must be > 0");
  if (!(x > 0.0) || !(x < r)) return 0.0;
  const double d = 1.0 / s2v - 1.0 / s1v;
  const double a = 0.25 * r * d;
  const double log_f = 0.5 * (x - 0.5 * r) * d - std::fabs(a) - std::log(bessel_i0_scaled(std::fabs(a))) -
                       std::log(kPi) - 0.5 * std::log(x * (r - x));
  return std::exp(log_f);
}

Coeffs hoyt_coeffs(const OuParams& p, double s, double r) {
  check_hoyt_preconditions(p);
  require_r(r, "hoyt_coeffs");
  const double s1v = transient_moments(p, s, Component::I).variance;
  const double s2v = transient_moments(p, s, Component::Q).variance;
  return hoyt_from_variances(p, s1v, s2v, r);
}

ProjectedModel ProjectedModel::rayleigh(const RayleighParams& p) {
  validate(p);
  ProjectedModel m;
  m.kind_ = FadingKind::Rayleigh;
  m.ray_ = p;
  m.ou_ = to_ou(p);
  return m;
}

ProjectedModel ProjectedModel::rice(const OuParams& p, RiceMode mode) {
  validate(p);
  check_rice_symmetry(p);
  ProjectedModel m;
  m.kind_ = FadingKind::Rice;
  m.rice_mode_ = mode;
  m.ou_ = p;
  return m;
}

ProjectedModel ProjectedModel::hoyt(const OuParams& p) {
  validate(p);
  check_hoyt_preconditions(p);
  ProjectedModel m;
  m.kind_ = FadingKind::Hoyt;
  m.ou_ = p;
  return m;
}

ProjectedModel ProjectedModel::from_ou(const OuParams& p, RiceMode mode) {
  const FadingClass fc = classify_fading(p);
  switch (fc.kind) {
    case FadingKind::Rayleigh:
      return rayleigh({2.0 * p.k1, p.beta1 / std::sqrt(p.k1), p.i0, p.q0});
    case FadingKind::Rice:
      return rice(p, mode);
    case FadingKind::Hoyt:
      return hoyt(p);
    case FadingKind::Beckmann:
      break;
  }
  throw ConfigError("no projected SDE for the Beckmann class (nonzero mean with unequal components)");
}

Coeffs ProjectedModel::coeffs(double s, double r) const { return at(s)(r); }

ProjectedModel::Slice ProjectedModel::at(double s) const {
  if (!(s >= 0.0)) throw DomainError("ProjectedModel::at: s must be >= 0");
  Slice sl;
  sl.model_ = this;
  sl.s_ = s;
  if (kind_ == FadingKind::Rice) {
    const Moments mo = transient_moments(ou_, s, Component::I);
    sl.m_ = mo.mean;
    sl.sigv_ = mo.variance;
  } else if (kind_ == FadingKind::Hoyt) {
    sl.s1v_ = transient_moments(ou_, s, Component::I).variance;
    sl.s2v_ = transient_moments(ou_, s, Component::Q).variance;
  }
  return sl;
}

std::vector<ProjectedModel::Slice> ProjectedModel::slices(double dt, int steps) const {
  std::vector<Slice> out;
  out.reserve(steps);
  for (int n = 0; n < steps; ++n) out.push_back(at(n * dt));
  return out;
}

Coeffs ProjectedModel::Slice::operator()(double r) const {
  const ProjectedModel& m = *model_;
  switch (m.kind_) {
    case FadingKind::Rayleigh: {
      const double s2 = m.ray_.sigma * m.ray_.sigma;
      return {m.ray_.B * (s2 - r), m.ray_.sigma * std::sqrt(2.0 * m.ray_.B * r)};
    }
    case FadingKind::Rice:
      return rice_from_moments(m.ou_, m_, sigv_, r, m.rice_mode_);
    case FadingKind::Hoyt:
      return hoyt_from_variances(m.ou_, s1v_, s2v_, r);
    case FadingKind::Beckmann:
      break;
  }
  throw ConfigError("unsupported fading class");
}

}  // namespace fadesim
