#include <doctest.h>

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "fade_duration_mc.hpp"
#include "rng.hpp"
#include "validation.hpp"

using namespace fadesim;

namespace {

std::vector<double> exponential_sample(std::size_t n, double mean, std::uint64_t seed) {
  // (e1^2 + e2^2)/2 ~ Exp(1)
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    NormalStream s(seed, k);
    const double a = s.at(0), b = s.at(1);
    v[k] = mean * 0.5 * (a * a + b * b);
  }
  return v;
}

}  // namespace

TEST_CASE("two-sample KS statistic") {
  const std::vector<double> a{0.1, 0.4, 0.7, 0.9};
  CHECK(ks_two_sample(a, a) == 0.0);
  CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == 1.0);
  // F_a jumps to 1/2 at 1, F_b stays 0 until 2
  CHECK(ks_two_sample({1, 3}, {2, 4}) == doctest::Approx(0.5));
  // ties are stepped over together
  CHECK(ks_two_sample({1, 1, 2, 2}, {1, 2}) == 0.0);
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), ConfigError);
}

TEST_CASE("critical values") {
  // c(0.05) = 1.3581
  CHECK(ks_critical_one_sample(100, 0.05) == doctest::Approx(0.13581).epsilon(1e-4));
  CHECK(ks_critical_two_sample(100, 100, 0.05) == doctest::Approx(1.3581 * std::sqrt(0.02)).epsilon(1e-4));
  CHECK_THROWS_AS(ks_critical_one_sample(10, 1.5), ConfigError);
}

TEST_CASE("goodness of fit accepts the right law and rejects a shift") {
  const auto s = exponential_sample(20000, 2.0, 5);
  const GofReport ok = gof_stationary(s, Law::exponential(2.0));
  CHECK(ok.pass);
  CHECK(ok.n == 20000);
  std::vector<double> shifted(s);
  for (double& y : shifted) y += 1.0;
  CHECK_FALSE(gof_stationary(shifted, Law::exponential(2.0)).pass);

  // the quadrature CDF path agrees with the closed form when the Hoyt law degenerates
  const GofReport h = gof_stationary(s, Law::squared_hoyt(1.0, 1.0));
  CHECK(h.statistic == doctest::Approx(ok.statistic).epsilon(1e-6));
  const GofReport r = gof_stationary(s, Law::squared_rice(0.0, 1.0));
  CHECK(r.statistic == doctest::Approx(ok.statistic).epsilon(1e-6));
}

TEST_CASE("squared Hoyt law of the simulated I/Q pair") {
  OuParams p;
  p.k1 = 0.1;
  p.k2 = 0.5;
  const double T = 4.0;
  const IqSimulator sim(p, 0.5, {T, 200});
  const auto paths = sample_paths(iq_sampler(sim, 11), 20000, 4);
  std::vector<double> r;
  for (const auto& f : paths) r.push_back(f.r);
  const Law law = Law::squared_hoyt(transient_moments(p, T, Component::I).variance,
                                    transient_moments(p, T, Component::Q).variance);
  const GofReport g = gof_stationary(r, law);
  CHECK(g.pass);
  CHECK(g.test == "ks_squared_hoyt");
  const Histogram hist = fade_histogram(r, 40);
  CHECK(chi_square_gof(hist, law).pass);
  CHECK_FALSE(chi_square_gof(hist, Law::exponential(2.0)).pass);
}

TEST_CASE("law densities integrate to one") {
  for (const Law& law : {Law::exponential(0.7), Law::squared_hoyt(0.3, 2.0), Law::squared_rice(1.2, 0.4)}) {
    double s = 0.0;
    const double h = 1e-3;
    for (double y = h / 2; y < 80.0; y += h) s += law.pdf(y) * h;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("law parsing and argument checks") {
  CHECK(Law::parse("squared_rice").kind == LawKind::SquaredRice);
  CHECK(Law::parse("exponential").name() == "exponential");
  CHECK_THROWS_AS(Law::parse("lognormal"), ConfigError);
  CHECK_THROWS_AS(Law::exponential(0.0), ConfigError);
  CHECK_THROWS_AS(Law::squared_hoyt(1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(gof_stationary({}, Law::exponential(1.0)), ConfigError);
}
