#pragma once

#include <cstdint>
#include <vector>

#include "fade_duration_mc.hpp"
#include "kbe_solver.hpp"
#include "sde_integrator.hpp"

namespace fadesim {

struct IsEstimate {
  double w = 0.0;
  double p_hat = 0.0;
  double variance = 0.0;  // single-sample variance of the weighted indicator
  double rel_error = 0.0;
  double ci_halfwidth = 0.0;
  std::uint64_t m_samples = 0;
  std::uint64_t hits = 0;        // paths with Z(T) > w
  double max_term_share = 0.0;   // largest weighted term over their sum
  double confidence = kConfidence95;
  bool degenerate = false;       // no path reached the event
};

struct IsOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  double confidence = kConfidence95;
  unsigned workers = 1;
  double v_floor = 1e-12;
  double zeta_cap = 50.0;
};

// Averages 1{Z(T) > w} exp(log-likelihood) over controlled paths; path k uses stream k.
IsEstimate is_estimate(const ProjectedSimulator& sim, double r0, const ControlFn& control, double w,
                       const IsOptions& opt);

// Optimal control from a solved grid. Only the Rayleigh class is supported, and the
// grid must match the simulator's (B, sigma, gamma, T).
IsEstimate is_estimate(const ProjectedModel& model, const ProjectedSimulator& sim, double r0,
                       const ValueFunctionGrid& grid, double w, const IsOptions& opt);

struct ComparisonRow {
  double w;
  double a_mc, a_is;
  double var_mc, var_is;
  double relerr_mc, relerr_is;
  double m_needed_mc, m_needed_is;
};

std::vector<ComparisonRow> estimator_comparison(const CcdfEstimate& mc, const std::vector<IsEstimate>& is,
                                                double target_rel_error);

}  // namespace fadesim
