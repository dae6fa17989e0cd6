#include <doctest.h>

#include <cmath>
#include <limits>

#include "errors.hpp"
#include "rng.hpp"
#include "sde_integrator.hpp"

using namespace fadesim;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normal stream is addressable and standard") {
  NormalStream a(7, 3), b(7, 3), c(7, 4);
  CHECK(a.at(11) == b.at(11));
  CHECK(a.at(5) == b.at(5));  // random access backwards
  CHECK(a.at(0) != c.at(0));
  const int n = 400000;
  double s1 = 0, s2 = 0, s4 = 0, cross = 0;
  NormalStream s(1, 0), t(1, 1);
  for (int k = 0; k < n; ++k) {
    const double x = s.at(k), y = t.at(k);
    s1 += x;
    s2 += x * x;
    s4 += x * x * x * x;
    cross += x * y;
  }
  CHECK(std::fabs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::fabs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::fabs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
  CHECK(std::fabs(cross / n) < 5.0 / std::sqrt(n));
}

TEST_CASE("fade indicator, Z increments and truncation") {
  const ProjectedModel model = ProjectedModel::rayleigh({1.0, 1.0, 1.0, 1.0});
  const TimeGrid grid{4.0, 100};
  const double gamma = 0.5, dt = grid.dt();
  for (std::uint64_t k = 0; k < 200; ++k) {
    const FadePath p = simulate_projected_fade(model, 2.0, gamma, grid, {3, k});
    REQUIRE(p.r_values.size() == 101);
    CHECK(p.z_values[0] == 0.0);
    for (int n = 0; n < 100; ++n) {
      const double step = p.z_values[n + 1] - p.z_values[n];
      // sequential sum: either unchanged or exactly one more dt added
      const bool faded = p.r_values[n] < gamma * gamma;
      CHECK(p.z_values[n + 1] == (faded ? p.z_values[n] + dt : p.z_values[n]));
      CHECK((step == 0.0 || std::fabs(step - dt) < 1e-15));
      CHECK(p.r_values[n + 1] >= 0.0);
    }
    CHECK(p.z_values[100] <= 4.0 + 1e-12);
  }
  // gamma = 0 never fades
  const FadePath p = simulate_projected_fade(model, 0.0, 0.0, grid, {1, 0});
  CHECK(p.z_values.back() == 0.0);
}

TEST_CASE("bit-exact reproducibility and stream independence") {
  const ProjectedModel model = ProjectedModel::rayleigh({1.0, 1.0, 1.0, 1.0});
  const ProjectedSimulator sim(model, 0.5, {4.0, 100});
  const FadeSample a = sim.run(2.0, {42, 9}), b = sim.run(2.0, {42, 9}), c = sim.run(2.0, {42, 10});
  CHECK(a.r == b.r);
  CHECK(a.z == b.z);
  CHECK(a.r != c.r);
  const IqSimulator iq(to_ou({1.0, 1.0, 1.0, 1.0}), 0.5, {4.0, 100});
  CHECK(iq.run({5, 5}).r == iq.run({5, 5}).r);
  FadePath path;
  sim.run(2.0, {42, 9}, path);
  CHECK(path.r_values.back() == a.r);
}

TEST_CASE("zero control reproduces the uncontrolled path with unit likelihood") {
  const ProjectedModel model = ProjectedModel::rayleigh({1.0, 1.0, 1.0, 1.0});
  const ProjectedSimulator sim(model, 0.5, {4.0, 100});
  const ControlFn zero = [](double, double, double) { return 0.0; };
  for (std::uint64_t k = 0; k < 100; ++k) {
    const FadeSample u = sim.run(2.0, {1, k});
    const FadeSample c = sim.run_controlled(2.0, {1, k}, zero);
    CHECK(u.r == c.r);
    CHECK(u.z == c.z);
    CHECK(c.log_likelihood == 0.0);
  }
}

TEST_CASE("constant control: likelihood is the Girsanov sum") {
  const ProjectedModel model = ProjectedModel::rayleigh({1.0, 1.0, 1.0, 1.0});
  const TimeGrid grid{1.0, 10};
  const ControlFn ctl = [](double, double, double) { return 0.7; };
  const FadePath p = simulate_controlled_fade(model, ctl, 2.0, 0.5, grid, {2, 0});
  NormalStream eps(2, 0);
  double ll = 0.0;
  for (int n = 0; n < 10; ++n) ll += -0.5 * 0.1 * 0.49 - std::sqrt(0.1) * eps.at(n) * 0.7;
  CHECK(p.log_likelihood == doctest::Approx(ll).epsilon(1e-14));
  const ControlFn nan = [](double, double, double) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(simulate_controlled_fade(model, nan, 2.0, 0.5, grid, {2, 0}), NumericalError);
}

TEST_CASE("Euler means follow the discrete mean recursion") {
  // E[x_{n+1}] = E[x_n] + B(sigma^2 - E[x_n]) dt for the linear drift; truncation is
  // negligible from r0 = 2 over this horizon
  const RayleighParams rp{1.0, 1.0, 1.0, 1.0};
  const ProjectedModel model = ProjectedModel::rayleigh(rp);
  const TimeGrid grid{1.0, 50};
  const ProjectedSimulator sim(model, 0.5, grid);
  double m = 2.0, mi = 1.0;
  for (int n = 0; n < 50; ++n) {
    m += (1.0 - m) * grid.dt();
    mi += -0.5 * mi * grid.dt();
  }
  const int M = 100000;
  double s = 0, s2 = 0;
  for (int k = 0; k < M; ++k) {
    const double x = sim.run(2.0, {11, std::uint64_t(k)}).r;
    s += x;
    s2 += x * x;
  }
  const double mean = s / M, sd = std::sqrt(s2 / M - mean * mean);
  CHECK(std::fabs(mean - m) < 4.0 * sd / std::sqrt(M));
  // I/Q system with Q frozen at zero, so R(T) = I(T)^2
  OuParams o = to_ou(rp);
  o.q0 = 0.0;
  o.beta2 = 1e-300;
  const IqSimulator iq1(o, 0.5, grid);
  double sum_r = 0, sum_r2 = 0;
  for (int k = 0; k < M; ++k) {
    const double r = iq1.run({12, std::uint64_t(k)}).r;  // ~ I(T)^2
    sum_r += r;
    sum_r2 += r * r;
  }
  // E[I^2] = mi^2 + Var, Var by the recursion v' = (1 - k dt)^2 v + beta^2 dt
  double v = 0.0;
  for (int n = 0; n < 50; ++n) v = (1 - o.k1 * grid.dt()) * (1 - o.k1 * grid.dt()) * v + o.beta1 * o.beta1 * grid.dt();
  const double er = sum_r / M, sdr = std::sqrt(sum_r2 / M - er * er);
  CHECK(std::fabs(er - (mi * mi + v)) < 4.0 * sdr / std::sqrt(M));
}

TEST_CASE("invalid grids and thresholds") {
  const ProjectedModel model = ProjectedModel::rayleigh({});
  CHECK_THROWS_AS(ProjectedSimulator(model, 0.5, {0.0, 10}), ConfigError);
  CHECK_THROWS_AS(ProjectedSimulator(model, 0.5, {1.0, 0}), ConfigError);
  CHECK_THROWS_AS(ProjectedSimulator(model, -0.1, {1.0, 10}), ConfigError);
  const ProjectedSimulator sim(model, 0.5, {1.0, 10});
  CHECK_THROWS_AS(sim.run(-1.0, {1, 0}), DomainError);
}
