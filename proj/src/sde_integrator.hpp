#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "markovian_projection.hpp"
#include "ou_channel.hpp"
#include "rng.hpp"

namespace fadesim {

struct TimeGrid {
  double t_final = 4.0;
  int steps = 100;

  double dt() const { return t_final / steps; }
  double time(int n) const { return n * dt(); }
};

void validate(const TimeGrid& g);

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

struct FadePath {
  TimeGrid grid;
  std::vector<double> r_values;  // N+1 entries
  std::vector<double> z_values;  // N+1 entries
  double log_likelihood = 0.0;
};

// Final state of one path; enough for every estimator.
struct FadeSample {
  double r = 0.0;
  double z = 0.0;
  double log_likelihood = 0.0;
};

// Control law zeta(t, x, z) for the tilted drift b(x) * zeta.
using ControlFn = std::function<double(double t, double x, double z)>;

// Euler-Maruyama on (I, Q); Z accumulates dt * 1{I^2+Q^2 < gamma^2} at the left endpoint.
class IqSimulator {
 public:
  IqSimulator(const OuParams& p, double gamma, const TimeGrid& grid);

  FadeSample run(RngStream rng) const;
  void run(RngStream rng, FadePath& out) const;

 private:
  template <class Rec>
  FadeSample integrate(RngStream rng, Rec&& rec) const;

  OuParams p_;
  double gamma2_;
  TimeGrid grid_;
};

// Euler-Maruyama on the projected square envelope with full truncation: coefficients
// at max(R, 0) and the state floored at 0 after every step.
class ProjectedSimulator {
 public:
  ProjectedSimulator(const ProjectedModel& model, double gamma, const TimeGrid& grid);

  FadeSample run(double r0, RngStream rng) const;
  void run(double r0, RngStream rng, FadePath& out) const;

  // Tilted dynamics: drift a + b*zeta; the log-likelihood accumulates
  // -dt*zeta^2/2 - sqrt(dt)*eps*zeta with eps the drawn normal.
  FadeSample run_controlled(double r0, RngStream rng, const ControlFn& control) const;
  void run_controlled(double r0, RngStream rng, const ControlFn& control, FadePath& out) const;

  const TimeGrid& grid() const { return grid_; }
  double gamma() const { return gamma_; }

 private:
  template <class Ctrl, class Rec>
  FadeSample integrate(double r0, RngStream rng, Ctrl&& control, Rec&& rec) const;

  const ProjectedModel* model_;
  double gamma_, gamma2_;
  TimeGrid grid_;
  std::vector<ProjectedModel::Slice> slices_;
};

// One-shot conveniences mirroring the simulator classes.
FadePath simulate_iq_fade(const OuParams& p, double gamma, const TimeGrid& grid, RngStream rng);
FadePath simulate_projected_fade(const ProjectedModel& model, double r0, double gamma, const TimeGrid& grid,
                                 RngStream rng);
FadePath simulate_controlled_fade(const ProjectedModel& model, const ControlFn& control, double r0, double gamma,
                                  const TimeGrid& grid, RngStream rng);

}  // namespace fadesim
