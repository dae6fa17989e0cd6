#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sde_integrator.hpp"

namespace fadesim {

constexpr double kConfidence95 = 1.96;

struct CcdfEstimate {
  std::vector<double> w;
  std::vector<double> p_hat;
  std::vector<double> variance;  // single-sample variance p(1-p)
  std::vector<double> rel_error;
  std::vector<double> ci_halfwidth;
  std::uint64_t m_samples = 0;
  double jump_at_zero = 0.0;
  double confidence = kConfidence95;
};

// Produces the final state of path k; must be a pure function of k.
using PathSampler = std::function<FadeSample(std::uint64_t k)>;

struct McOptions {
  std::uint64_t samples = 1000000;
  double confidence = kConfidence95;
  unsigned workers = 1;
};

// w_grid must be nondecreasing.
CcdfEstimate mc_ccdf(const PathSampler& sampler, const std::vector<double>& w_grid, const McOptions& opt);

// Final states of paths 0..M-1, in path order.
std::vector<FadeSample> sample_paths(const PathSampler& sampler, std::uint64_t m, unsigned workers);

// C sqrt(var) / (sqrt(M) p); +inf when p = 0.
double relative_error(double p, double var, std::uint64_t m, double c);

// Samples needed for a target relative error at confidence constant c.
double samples_needed(double p, double var, double target, double c);

std::vector<double> linspace(double lo, double hi, int count);

struct Histogram {
  double lo = 0.0, hi = 0.0;
  std::vector<double> edges;  // bins+1 entries
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double density(std::size_t b) const;
};

Histogram fade_histogram(const std::vector<double>& samples, int bins);
Histogram fade_histogram(const std::vector<double>& samples, int bins, double lo, double hi);

// Samplers over the two simulated systems; stream id = path index.
PathSampler iq_sampler(const IqSimulator& sim, std::uint64_t seed);
PathSampler projected_sampler(const ProjectedSimulator& sim, double r0, std::uint64_t seed);

}  // namespace fadesim
