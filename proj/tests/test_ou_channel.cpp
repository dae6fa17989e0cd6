#include <doctest.h>

#include <cmath>
#include <string>

#include "errors.hpp"
#include "ou_channel.hpp"

using namespace fadesim;

TEST_CASE("classification by parameter symmetry") {
  OuParams p;  // symmetric, zero mean
  CHECK(classify_fading(p).kind == FadingKind::Rayleigh);
  CHECK(classify_fading(p).scale == doctest::Approx(1.0 / std::sqrt(2.0)));

  p.theta1 = p.theta2 = 1.0;
  const FadingClass rice = classify_fading(p);
  CHECK(rice.kind == FadingKind::Rice);
  CHECK(rice.nu == doctest::Approx(std::sqrt(2.0)));

  OuParams h{0.1, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
  const FadingClass hoyt = classify_fading(h);
  CHECK(hoyt.kind == FadingKind::Hoyt);
  CHECK(hoyt.q == doctest::Approx(std::sqrt(0.2)));
  CHECK(hoyt.mean_square == doctest::Approx(1.0 / 0.2 + 1.0 / 1.0));

  h.theta1 = 0.3;
  CHECK(classify_fading(h).kind == FadingKind::Beckmann);

  // exact comparisons: a one-ulp asymmetry is not Rayleigh
  OuParams q;
  q.k2 = std::nextafter(1.0, 2.0);
  CHECK(classify_fading(q).kind == FadingKind::Hoyt);
}

TEST_CASE("rayleigh reparameterisation") {
  const OuParams o = to_ou({2.0, 1.5, 0.3, -0.4});
  CHECK(o.k1 == 1.0);
  CHECK(o.k2 == 1.0);
  CHECK(o.beta1 == doctest::Approx(1.5));
  // stationary per-component variance beta^2/(2k) = sigma^2/2
  CHECK(o.beta1 * o.beta1 / (2.0 * o.k1) == doctest::Approx(1.125));
  CHECK(o.i0 == 0.3);
  CHECK(o.q0 == -0.4);
}

TEST_CASE("validation lists every bad field") {
  OuParams p;
  p.k1 = -1.0;
  p.beta2 = 0.0;
  p.theta1 = NAN;
  try {
    validate(p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    CHECK(m.find("k1") != std::string::npos);
    CHECK(m.find("beta2") != std::string::npos);
    CHECK(m.find("theta1") != std::string::npos);
  }
  CHECK_THROWS_AS(validate(RayleighParams{0.0, 1.0, 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(RayleighParams{1.0, -1.0, 0.0, 0.0}), ConfigError);
  CHECK_NOTHROW(validate(RayleighParams{}));
}

TEST_CASE("transient moments solve the OU mean/variance ODEs") {
  const OuParams p{0.7, 1.3, 0.5, -2.0, 0.9, 1.1, 1.0, 3.0};
  for (double s : {0.0, 1e-9, 0.01, 0.5, 2.0, 30.0}) {
    for (Component c : {Component::I, Component::Q}) {
      const bool i = c == Component::I;
      const double k = i ? p.k1 : p.k2, th = i ? p.theta1 : p.theta2, b = i ? p.beta1 : p.beta2;
      const double x0 = i ? p.i0 : p.q0;
      const Moments m = transient_moments(p, s, c);
      CHECK(m.mean == doctest::Approx(th + (x0 - th) * std::exp(-k * s)).epsilon(1e-13));
      if (s > 0.01) CHECK(m.variance == doctest::Approx(b * b / (2 * k) * (1 - std::exp(-2 * k * s))).epsilon(1e-13));
    }
  }
  // small-time variance ~ beta^2 s, no cancellation
  CHECK(transient_moments(p, 1e-12, Component::I).variance == doctest::Approx(0.81e-12).epsilon(1e-9));
  CHECK_THROWS_AS(transient_moments(p, -1.0, Component::I), DomainError);
}

TEST_CASE("square-envelope mean and autocovariance") {
  const RayleighParams p{1.3, 0.8, 0.6, 0.9};
  const double r0 = 0.6 * 0.6 + 0.9 * 0.9;
  for (double t : {0.0, 0.4, 2.0, 50.0}) {
    CHECK(rbar_mean(p, t, r0) == doctest::Approx(r0 * std::exp(-1.3 * t) + 0.64 * (1 - std::exp(-1.3 * t))));
    for (double d : {0.0, 0.1, 1.0}) {
      // Gaussian oracle: per component Cov(X^2, Y^2) = 2C^2 + 4 mu_x mu_y C
      const OuParams o = to_ou(p);
      double ref = 0.0;
      for (Component c : {Component::I, Component::Q}) {
        const Moments m = transient_moments(o, t, c);
        const double cxy = iq_autocovariance(o, t, d, c);
        const double mu_y = m.mean * std::exp(-o.k1 * d);
        ref += 2 * cxy * cxy + 4 * m.mean * mu_y * cxy;
      }
      CHECK(rbar_autocovariance(p, t, d, r0) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  // stationary limits sigma^2, sigma^4 e^{-B dt}
  CHECK(rbar_mean(p, 200.0, r0) == doctest::Approx(0.64));
  CHECK(rbar_autocovariance(p, 200.0, 0.5, r0) == doctest::Approx(0.64 * 0.64 * std::exp(-1.3 * 0.5)));
}
