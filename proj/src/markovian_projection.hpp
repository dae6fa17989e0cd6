#pragma once

#include <vector>

#include "ou_channel.hpp"

namespace fadesim {

struct Coeffs {
  double drift;
  double diffusion;
};

enum class RiceMode { Exact, Affine };

Coeffs rayleigh_coeffs(double B, double sigma, double s, double r);
double rayleigh_stationary_pdf(double sigma, double y);

// Density of I(s) given I^2+Q^2 = r for the Rice model, m = m(s), sigv = sigma^2(s).
double rice_cond_pdf(double m, double sigv, double r, double x);
double rice_cond_exp(double m, double sigv, double r, RiceMode mode);
Coeffs rice_coeffs(const OuParams& p, double s, double r, RiceMode mode);

struct HoytExps {
  double eI2;
  double eQ2;
};

HoytExps hoyt_cond_exps(double s1v, double s2v, double r);
// Density of I^2(s) given I^2+Q^2 = r for the zero-mean model.
double hoyt_cond_pdf(double s1v, double s2v, double r, double x);
Coeffs hoyt_coeffs(const OuParams& p, double s, double r);

// The 1D square-envelope SDE dR = a(s,R) ds + b(s,R) dW for one fading class.
class ProjectedModel {
 public:
  static ProjectedModel rayleigh(const RayleighParams& p);
  static ProjectedModel rice(const OuParams& p, RiceMode mode = RiceMode::Affine);
  static ProjectedModel hoyt(const OuParams& p);
  // Dispatches on classify_fading; Beckmann is rejected.
  static ProjectedModel from_ou(const OuParams& p, RiceMode mode = RiceMode::Affine);

  FadingKind kind() const { return kind_; }
  RiceMode rice_mode() const { return rice_mode_; }
  const OuParams& ou() const { return ou_; }
  const RayleighParams& rayleigh_params() const { return ray_; }
  bool time_homogeneous() const { return kind_ == FadingKind::Rayleigh; }
  double r0() const { return ou_.i0 * ou_.i0 + ou_.q0 * ou_.q0; }

  Coeffs coeffs(double s, double r) const;

  // Coefficients frozen at one time; the integrator builds one per grid time so the
  // transient moments are not recomputed per path.
  class Slice {
   public:
    Coeffs operator()(double r) const;

   private:
    friend class ProjectedModel;
    const ProjectedModel* model_ = nullptr;
    double s_ = 0.0;
    double m_ = 0.0, sigv_ = 0.0;     // Rice
    double s1v_ = 0.0, s2v_ = 0.0;    // Hoyt
  };

  Slice at(double s) const;
  std::vector<Slice> slices(double dt, int steps) const;

 private:
  FadingKind kind_ = FadingKind::Rayleigh;
  RiceMode rice_mode_ = RiceMode::Affine;
  OuParams ou_;
  RayleighParams ray_;
};

}  // namespace fadesim
