#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "importance_sampling.hpp"

using namespace fadesim;

namespace {

const ProjectedModel& rayleigh() {
  static const ProjectedModel m = ProjectedModel::rayleigh({1.0, 1.0, 1.0, 1.0});
  return m;
}

const ValueFunctionGrid& grid() {
  static const ValueFunctionGrid g = [] {
    KbeGridConfig c;
    c.nt = 80;
    c.nx = 80;
    return solve_kbe(c);
  }();
  return g;
}

}  // namespace

TEST_CASE("zero control coincides with plain MC") {
  const ProjectedSimulator sim(rayleigh(), 0.5, {4.0, 100});
  const ControlFn zero = [](double, double, double) { return 0.0; };
  IsOptions opt;
  opt.samples = 20000;
  opt.seed = 4;
  opt.workers = 3;
  const CcdfEstimate mc = mc_ccdf(projected_sampler(sim, 2.0, 4), {1.0, 2.0}, {20000, 1.96, 2});
  for (int k = 0; k < 2; ++k) {
    const IsEstimate e = is_estimate(sim, 2.0, zero, mc.w[k], opt);
    CHECK(e.p_hat == doctest::Approx(mc.p_hat[k]).epsilon(1e-14));
    CHECK(double(e.hits) == mc.p_hat[k] * 20000);
    // unbiased single-sample variance of a 0/1 variable
    CHECK(e.variance == doctest::Approx(mc.variance[k] * 20000.0 / 19999.0).epsilon(1e-12));
  }
}

TEST_CASE("weighted average matches a direct loop") {
  const ProjectedSimulator sim(rayleigh(), 0.5, {4.0, 100});
  const ControlFn ctl = [](double t, double x, double) { return -0.4 * std::sqrt(x) * (1.0 - 0.1 * t); };
  IsOptions opt;
  opt.samples = 5000;
  opt.seed = 8;
  const double w = 1.5;
  const IsEstimate e = is_estimate(sim, 2.0, ctl, w, opt);
  long double s = 0, s2 = 0;
  long double mx = 0;
  for (std::uint64_t k = 0; k < opt.samples; ++k) {
    const FadeSample f = sim.run_controlled(2.0, {8, k}, ctl);
    if (f.z > w) {
      const long double y = expl(f.log_likelihood);
      s += y;
      s2 += y * y;
      mx = std::max(mx, y);
    }
  }
  const long double m = opt.samples, p = s / m;
  CHECK(e.p_hat == doctest::Approx(double(p)).epsilon(1e-13));
  CHECK(e.variance == doctest::Approx(double((s2 / m - p * p) * m / (m - 1))).epsilon(1e-10));
  CHECK(e.max_term_share == doctest::Approx(double(mx / s)).epsilon(1e-12));
  CHECK(e.max_term_share > 0.0);
  CHECK(e.max_term_share <= 1.0);
}

TEST_CASE("a tilted measure stays unbiased") {
  const ProjectedSimulator sim(rayleigh(), 0.5, {4.0, 100});
  const ControlFn ctl = [](double, double x, double) { return x > 0.25 ? -0.5 : 0.0; };
  IsOptions opt;
  opt.samples = 100000;
  opt.seed = 21;
  opt.workers = 4;
  const IsEstimate e = is_estimate(sim, 2.0, ctl, 2.0, opt);
  const CcdfEstimate mc = mc_ccdf(projected_sampler(sim, 2.0, 22), {2.0}, {100000, 1.96, 4});
  const double gap = std::fabs(e.p_hat - mc.p_hat[0]);
  CHECK(gap < e.ci_halfwidth + mc.ci_halfwidth[0]);
}

TEST_CASE("optimal control from the value grid") {
  const ProjectedSimulator sim(rayleigh(), 0.5, {4.0, 100});
  IsOptions opt;
  opt.samples = 4000;
  opt.seed = 3;
  opt.workers = 1;
  const IsEstimate a = is_estimate(rayleigh(), sim, 2.0, grid(), 3.0, opt);
  opt.workers = 5;
  const IsEstimate b = is_estimate(rayleigh(), sim, 2.0, grid(), 3.0, opt);
  CHECK(a.p_hat == b.p_hat);  // bit-exact for any worker count
  CHECK(a.variance == b.variance);
  CHECK(a.hits > opt.samples / 10);  // the tilt makes the rare event common
  CHECK(a.p_hat > 0.0);
  CHECK(a.p_hat < 1e-3);

  const IsEstimate none = is_estimate(rayleigh(), sim, 2.0, grid(), 4.5, opt);
  CHECK(none.degenerate);
  CHECK(none.p_hat == 0.0);
  CHECK(std::isinf(none.rel_error));
}

TEST_CASE("scope and consistency checks") {
  const ProjectedSimulator sim(rayleigh(), 0.5, {4.0, 100});
  IsOptions opt;
  opt.samples = 10;
  const OuParams rice{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0};
  const ProjectedModel rm = ProjectedModel::rice(rice);
  const ProjectedSimulator rsim(rm, 0.5, {4.0, 100});
  CHECK_THROWS_AS(is_estimate(rm, rsim, 0.0, grid(), 2.0, opt), ConfigError);

  const ProjectedSimulator other_gamma(rayleigh(), 0.6, {4.0, 100});
  CHECK_THROWS_AS(is_estimate(rayleigh(), other_gamma, 2.0, grid(), 2.0, opt), ConfigError);
  const ProjectedModel b2 = ProjectedModel::rayleigh({2.0, 1.0, 1.0, 1.0});
  const ProjectedSimulator b2sim(b2, 0.5, {4.0, 100});
  CHECK_THROWS_AS(is_estimate(b2, b2sim, 2.0, grid(), 2.0, opt), ConfigError);

  KbeGridConfig c;
  c.nt = 20;
  c.nx = 20;
  const ValueFunctionGrid slice0 = solve_kbe(c, KbeStorage::InitialSlice);
  CHECK_THROWS_AS(is_estimate(rayleigh(), sim, 2.0, slice0, 2.0, opt), ConfigError);
  opt.samples = 1;
  CHECK_THROWS_AS(is_estimate(rayleigh(), sim, 2.0, grid(), 2.0, opt), ConfigError);
}

TEST_CASE("comparison table") {
  CcdfEstimate mc;
  mc.w = {2.5, 3.0};
  mc.p_hat = {3e-3, 1.8e-4};
  mc.variance = {3e-3 * (1 - 3e-3), 1.8e-4 * (1 - 1.8e-4)};
  mc.rel_error = {0.1, 0.2};
  mc.m_samples = 1000000;
  IsEstimate is;
  is.w = 3.0;
  is.p_hat = 1.5e-4;
  is.variance = 1.16e-7;
  is.rel_error = 0.05;
  const auto rows = estimator_comparison(mc, {is}, 0.05);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].a_mc == 1.8e-4);
  CHECK(rows[0].var_is == 1.16e-7);
  CHECK(rows[0].m_needed_mc == doctest::Approx(std::pow(1.96 / 0.05, 2) * mc.variance[1] / (1.8e-4 * 1.8e-4)));
  CHECK(rows[0].m_needed_is == doctest::Approx(std::pow(1.96 / 0.05, 2) * 1.16e-7 / (1.5e-4 * 1.5e-4)));
  is.w = 3.1;
  CHECK_THROWS_AS(estimator_comparison(mc, {is}, 0.05), ConfigError);
}
