#include "fade_duration_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "parallel.hpp"

namespace fadesim {
namespace {

constexpr std::uint64_t kChunk = 4096;

}  // namespace

double relative_error(double p, double var, std::uint64_t m, double c) {
  if (m == 0) throw DomainError("relative_error: M must be >= 1");
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return c * std::sqrt(std::max(var, 0.0)) / (std::sqrt(double(m)) * p);
}

double samples_needed(double p, double var, double target, double c) {
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  const double k = c / target;
  return k * k * var / (p * p);
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw ConfigError("linspace: count must be >= 1");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) v[i] = lo + i * step;
  v.back() = hi;
  return v;
}

CcdfEstimate mc_ccdf(const PathSampler& sampler, const std::vector<double>& w_grid, const McOptions& opt) {
  if (w_grid.empty()) throw ConfigError("mc_ccdf: empty w grid");
  if (!std::is_sorted(w_grid.begin(), w_grid.end())) throw ConfigError("mc_ccdf: w grid must be nondecreasing");
  if (opt.samples < 1) throw ConfigError("mc_ccdf: M must be >= 1");
  const std::size_t nw = w_grid.size();
  const std::uint64_t chunks = (opt.samples + kChunk - 1) / kChunk;
  // bucket b counts samples with exactly b grid points strictly below z
  std::vector<std::vector<std::uint64_t>> buckets(chunks);
  std::vector<std::uint64_t> zeros(chunks, 0);
  for_each_chunk(opt.samples, kChunk, opt.workers, [&](std::uint64_t b, std::uint64_t e, std::uint64_t c) {
    std::vector<std::uint64_t> local(nw + 1, 0);
    std::uint64_t z0 = 0;
    for (std::uint64_t k = b; k < e; ++k) {
      const double z = sampler(k).z;
      if (z == 0.0) ++z0;
      ++local[std::lower_bound(w_grid.begin(), w_grid.end(), z) - w_grid.begin()];
    }
    buckets[c] = std::move(local);
    zeros[c] = z0;
  });
  std::vector<std::uint64_t> total(nw + 1, 0);
  std::uint64_t zero_total = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    for (std::size_t i = 0; i <= nw; ++i) total[i] += buckets[c][i];
    zero_total += zeros[c];
  }

  CcdfEstimate est;
  est.w = w_grid;
  est.m_samples = opt.samples;
  est.confidence = opt.confidence;
  est.jump_at_zero = double(zero_total) / double(opt.samples);
  est.p_hat.resize(nw);
  est.variance.resize(nw);
  est.rel_error.resize(nw);
  est.ci_halfwidth.resize(nw);
  // samples above w_j are those in buckets j+1..nw
  std::uint64_t above = 0;
  for (std::size_t j = nw; j-- > 0;) {
    above += total[j + 1];
    const double p = double(above) / double(opt.samples);
    est.p_hat[j] = p;
    est.variance[j] = p * (1.0 - p);
    est.rel_error[j] = relative_error(p, est.variance[j], opt.samples, opt.confidence);
    est.ci_halfwidth[j] = opt.confidence * std::sqrt(est.variance[j] / double(opt.samples));
  }
  return est;
}

std::vector<FadeSample> sample_paths(const PathSampler& sampler, std::uint64_t m, unsigned workers) {
  std::vector<FadeSample> out(m);
  for_each_chunk(m, kChunk, workers, [&](std::uint64_t b, std::uint64_t e, std::uint64_t) {
    for (std::uint64_t k = b; k < e; ++k) out[k] = sampler(k);
  });
  return out;
}

double Histogram::density(std::size_t b) const {
  const double width = edges[b + 1] - edges[b];
  if (total == 0 || width <= 0.0) return 0.0;
  return double(counts[b]) / (double(total) * width);
}

Histogram fade_histogram(const std::vector<double>& samples, int bins) {
  if (samples.empty()) throw ConfigError("fade_histogram: no samples");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  return fade_histogram(samples, bins, *mn, *mx);
}

Histogram fade_histogram(const std::vector<double>& samples, int bins, double lo, double hi) {
  if (samples.empty()) throw ConfigError("fade_histogram: no samples");
  if (bins < 1) throw ConfigError("fade_histogram: bins must be >= 1");
  if (!(hi >= lo)) throw ConfigError("fade_histogram: hi must be >= lo");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.edges = linspace(lo, hi, bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (double x : samples) {
    if (x < lo || x > hi) continue;
    int b = width > 0.0 ? int((x - lo) / width) : 0;
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
    ++h.total;
  }
  return h;
}

PathSampler iq_sampler(const IqSimulator& sim, std::uint64_t seed) {
  return [&sim, seed](std::uint64_t k) { return sim.run({seed, k}); };
}

PathSampler projected_sampler(const ProjectedSimulator& sim, double r0, std::uint64_t seed) {
  return [&sim, r0, seed](std::uint64_t k) { return sim.run(r0, {seed, k}); };
}

}  // namespace fadesim
