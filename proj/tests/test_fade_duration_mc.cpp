#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "fade_duration_mc.hpp"

using namespace fadesim;

namespace {

struct Rayleigh {
  ProjectedModel model;
  ProjectedSimulator sim;
  explicit Rayleigh(RayleighParams p, double gamma = 0.5, int N = 100)
      : model(ProjectedModel::rayleigh(p)), sim(model, gamma, {4.0, N}) {}
  Rayleigh(const Rayleigh&) = delete;
};

}  // namespace

TEST_CASE("trivial thresholds and the exact-count oracle") {
  const Rayleigh r({1.0, 1.0, 1.0, 1.0});
  const PathSampler s = projected_sampler(r.sim, 2.0, 5);
  const std::uint64_t M = 20000;
  const std::vector<FadeSample> xs = sample_paths(s, M, 2);
  // grid with duplicates and values hit exactly by some Z(T)
  std::vector<double> w{-0.1, 0.0, 0.0, 0.04, 0.5, 1.0, 1.0, xs[3].z, 2.5, 4.0, 5.0};
  std::sort(w.begin(), w.end());
  const CcdfEstimate e = mc_ccdf(s, w, {M, 1.96, 3});
  for (std::size_t j = 0; j < w.size(); ++j) {
    std::uint64_t above = 0;
    for (const auto& x : xs) above += x.z > w[j];
    CHECK(e.p_hat[j] == double(above) / M);
    if (j) CHECK(e.p_hat[j] <= e.p_hat[j - 1]);
  }
  CHECK(e.p_hat.front() == 1.0);  // w = -0.1
  CHECK(e.p_hat.back() == 0.0);   // w = 5 > T
  const auto at_T = std::find(w.begin(), w.end(), 4.0) - w.begin();
  CHECK(e.p_hat[at_T] == 0.0);
  std::uint64_t zeros = 0;
  for (const auto& x : xs) zeros += x.z == 0.0;
  CHECK(e.jump_at_zero == double(zeros) / M);
  CHECK(e.jump_at_zero > 0.0);
}

TEST_CASE("estimates do not depend on the worker count") {
  const Rayleigh r({1.0, 1.0, 1.0, 1.0});
  const PathSampler s = projected_sampler(r.sim, 2.0, 9);
  const std::vector<double> w = linspace(0.0, 4.0, 41);
  const CcdfEstimate a = mc_ccdf(s, w, {30000, 1.96, 1});
  const CcdfEstimate b = mc_ccdf(s, w, {30000, 1.96, 7});
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.jump_at_zero == b.jump_at_zero);
}

TEST_CASE("relative error and required samples") {
  CHECK(relative_error(0.5, 0.25, 1000000, 1.96) == doctest::Approx(0.00196));
  CHECK(relative_error(1.0, 0.0, 10, 1.96) == 0.0);
  CHECK(std::isinf(relative_error(0.0, 0.0, 10, 1.96)));
  // (C / target)^2 var / p^2
  CHECK(samples_needed(1e-3, 1e-3 * (1 - 1e-3), 0.05, 1.96) == doctest::Approx(1536.64 * 0.999 * 1000));
  CHECK(std::isinf(samples_needed(0.0, 0.0, 0.05, 1.96)));
  CHECK_THROWS_AS(relative_error(0.5, 0.25, 0, 1.96), DomainError);
}

TEST_CASE("confidence interval fields") {
  const Rayleigh r({1.0, 1.0, 1.0, 1.0});
  const CcdfEstimate e = mc_ccdf(projected_sampler(r.sim, 2.0, 1), {1.0}, {10000, 2.5, 1});
  const double p = e.p_hat[0];
  CHECK(e.variance[0] == doctest::Approx(p * (1 - p)));
  CHECK(e.ci_halfwidth[0] == doctest::Approx(2.5 * std::sqrt(p * (1 - p) / 10000)));
  CHECK(e.rel_error[0] == doctest::Approx(e.ci_halfwidth[0] / p));
}

TEST_CASE("jump at zero shrinks when B grows") {
  const std::uint64_t M = 100000;
  const Rayleigh b1({1.0, 1.0, 1.0, 1.0}), b4({4.0, 1.0, 1.0, 1.0});
  const double j1 = mc_ccdf(projected_sampler(b1.sim, 2.0, 1), {0.0}, {M, 1.96, 4}).jump_at_zero;
  const double j4 = mc_ccdf(projected_sampler(b4.sim, 2.0, 1), {0.0}, {M, 1.96, 4}).jump_at_zero;
  const double se1 = std::sqrt(j1 * (1 - j1) / M), se4 = std::sqrt(j4 * (1 - j4) / M);
  CHECK(j4 + 3 * se4 < j1 - 3 * se1);
}

TEST_CASE("histogram") {
  const std::vector<double> same(100, 2.5);
  const Histogram h = fade_histogram(same, 10);
  int occupied = 0;
  for (auto c : h.counts) occupied += c > 0;
  CHECK(occupied == 1);
  CHECK(h.total == 100);

  std::mt19937_64 gen(3);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = ex(gen);
  const Histogram g = fade_histogram(xs, 37);
  std::uint64_t sum = 0;
  double mass = 0.0;
  for (std::size_t b = 0; b < g.counts.size(); ++b) {
    sum += g.counts[b];
    mass += g.density(b) * (g.edges[b + 1] - g.edges[b]);
  }
  CHECK(sum == 10000);
  CHECK(mass == doctest::Approx(1.0));
  CHECK(g.edges.front() == *std::min_element(xs.begin(), xs.end()));
  CHECK(g.edges.back() == *std::max_element(xs.begin(), xs.end()));
}

TEST_CASE("configuration errors") {
  const Rayleigh r({});
  const PathSampler s = projected_sampler(r.sim, 0.0, 1);
  CHECK_THROWS_AS(mc_ccdf(s, {}, {10, 1.96, 1}), ConfigError);
  CHECK_THROWS_AS(mc_ccdf(s, {2.0, 1.0}, {10, 1.96, 1}), ConfigError);
  CHECK_THROWS_AS(fade_histogram({}, 5), ConfigError);
  CHECK_THROWS_AS(fade_histogram({1.0}, 0), ConfigError);
}
