#include "importance_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "parallel.hpp"
#include "summation.hpp"

namespace fadesim {
namespace {

constexpr std::uint64_t kChunk = 1024;

bool same(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); }

}  // namespace

IsEstimate is_estimate(const ProjectedSimulator& sim, double r0, const ControlFn& control, double w,
                       const IsOptions& opt) {
  if (opt.samples < 2) throw ConfigError("importance sampling needs M >= 2");
  const std::uint64_t chunks = (opt.samples + kChunk - 1) / kChunk;
  std::vector<LogWeightSum> parts(chunks);
  for_each_chunk(opt.samples, kChunk, opt.workers, [&](std::uint64_t b, std::uint64_t e, std::uint64_t c) {
    LogWeightSum acc;
    for (std::uint64_t k = b; k < e; ++k) {
      const FadeSample s = sim.run_controlled(r0, {opt.seed, k}, control);
      if (s.z > w) acc.add(s.log_likelihood);
    }
    parts[c] = acc;
  });
  LogWeightSum total;
  for (const auto& p : parts) total.merge(p);

  IsEstimate est;
  est.w = w;
  est.m_samples = opt.samples;
  est.confidence = opt.confidence;
  est.hits = std::uint64_t(total.count());
  const double m = double(opt.samples);
  const double sum = total.sum();
  est.p_hat = sum / m;
  const double second = total.sum_sq() / m;
  est.variance = std::max(second - est.p_hat * est.p_hat, 0.0) * m / (m - 1.0);
  est.rel_error = relative_error(est.p_hat, est.variance, opt.samples, opt.confidence);
  est.ci_halfwidth = opt.confidence * std::sqrt(est.variance / m);
  est.degenerate = est.hits == 0;
  est.max_term_share = sum > 0.0 ? std::exp(total.max_log()) / sum : 0.0;
  return est;
}

IsEstimate is_estimate(const ProjectedModel& model, const ProjectedSimulator& sim, double r0,
                       const ValueFunctionGrid& grid, double w, const IsOptions& opt) {
  if (model.kind() != FadingKind::Rayleigh) {
    throw ConfigError(std::string("importance sampling supports only the rayleigh model, got ") +
                      to_string(model.kind()));
  }
  const KbeGridConfig& c = grid.config();
  const RayleighParams& p = model.rayleigh_params();
  std::string bad;
  if (!same(c.B, p.B)) bad += " B";
  if (!same(c.sigma, p.sigma)) bad += " sigma";
  if (!same(c.gamma, sim.gamma())) bad += " gamma";
  if (!same(c.T, sim.grid().t_final)) bad += " T";
  if (!bad.empty()) throw ConfigError("value grid was solved for different parameters:" + bad);
  if (!grid.has_slice(c.nt + 1)) throw ConfigError("importance sampling needs a grid with all time slices");
  const ControlPolicy policy{&grid, w, opt.v_floor, opt.zeta_cap};
  const ControlFn control = [&policy](double t, double x, double z) { return control_at(policy, t, x, z); };
  return is_estimate(sim, r0, control, w, opt);
}

std::vector<ComparisonRow> estimator_comparison(const CcdfEstimate& mc, const std::vector<IsEstimate>& is,
                                                double target_rel_error) {
  std::vector<ComparisonRow> rows;
  for (const IsEstimate& e : is) {
    const auto it = std::find(mc.w.begin(), mc.w.end(), e.w);
    if (it == mc.w.end()) throw ConfigError("estimator_comparison: w=" + std::to_string(e.w) + " missing from MC grid");
    const std::size_t j = std::size_t(it - mc.w.begin());
    ComparisonRow r;
    r.w = e.w;
    r.a_mc = mc.p_hat[j];
    r.a_is = e.p_hat;
    r.var_mc = mc.variance[j];
    r.var_is = e.variance;
    r.relerr_mc = mc.rel_error[j];
    r.relerr_is = e.rel_error;
    r.m_needed_mc = samples_needed(r.a_mc, r.var_mc, target_rel_error, mc.confidence);
    r.m_needed_is = samples_needed(r.a_is, r.var_is, target_rel_error, e.confidence);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fadesim
