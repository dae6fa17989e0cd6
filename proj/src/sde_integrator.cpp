#include "sde_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace fadesim {
namespace {

struct NoRecord {
  void operator()(int, double, double) const {}
};

struct PathRecord {
  FadePath& out;
  void operator()(int n, double r, double z) const {
    out.r_values[n] = r;
    out.z_values[n] = z;
  }
};

void prepare(FadePath& out, const TimeGrid& g) {
  out.grid = g;
  out.r_values.assign(g.steps + 1, 0.0);
  out.z_values.assign(g.steps + 1, 0.0);
  out.log_likelihood = 0.0;
}

struct ZeroControl {
  double operator()(double, double, double) const { return 0.0; }
};

}  // namespace

void validate(const TimeGrid& g) {
  if (!(g.t_final > 0.0) || !std::isfinite(g.t_final)) throw ConfigError("T must be finite and > 0");
  if (g.steps < 1) throw ConfigError("N must be >= 1");
}

IqSimulator::IqSimulator(const OuParams& p, double gamma, const TimeGrid& grid)
    : p_(p), gamma2_(gamma * gamma), grid_(grid) {
  validate(p);
  validate(grid);
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
}

template <class Rec>
FadeSample IqSimulator::integrate(RngStream rng, Rec&& rec) const {
  NormalStream normals(rng.seed, rng.stream_id);
  const double dt = grid_.dt();
  const double sdt = std::sqrt(dt);
  double i = p_.i0, q = p_.q0, z = 0.0;
  double r = i * i + q * q;
  rec(0, r, z);
  for (int n = 0; n < grid_.steps; ++n) {
    if (r < gamma2_) z += dt;
    const double e1 = normals.at(2 * std::uint64_t(n));
    const double e2 = normals.at(2 * std::uint64_t(n) + 1);
    i += p_.k1 * (p_.theta1 - i) * dt + p_.beta1 * sdt * e1;
    q += p_.k2 * (p_.theta2 - q) * dt + p_.beta2 * sdt * e2;
    r = i * i + q * q;
    rec(n + 1, r, z);
  }
  return {r, z, 0.0};
}

FadeSample IqSimulator::run(RngStream rng) const { return integrate(rng, NoRecord{}); }

void IqSimulator::run(RngStream rng, FadePath& out) const {
  prepare(out, grid_);
  integrate(rng, PathRecord{out});
}

ProjectedSimulator::ProjectedSimulator(const ProjectedModel& model, double gamma, const TimeGrid& grid)
    : model_(&model), gamma_(gamma), gamma2_(gamma * gamma), grid_(grid) {
  validate(grid);
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  slices_ = model.slices(grid.dt(), grid.steps);
}

template <class Ctrl, class Rec>
FadeSample ProjectedSimulator::integrate(double r0, RngStream rng, Ctrl&& control, Rec&& rec) const {
  if (!(r0 >= 0.0)) throw DomainError("initial square envelope must be >= 0");
  NormalStream normals(rng.seed, rng.stream_id);
  const double dt = grid_.dt();
  const double sdt = std::sqrt(dt);
  double x = r0, z = 0.0, ll = 0.0;
  rec(0, x, z);
  for (int n = 0; n < grid_.steps; ++n) {
    const double t = n * dt;
    const Coeffs c = slices_[n](x);
    const double zeta = control(t, x, z);
    if (!std::isfinite(zeta)) {
      std::ostringstream os;
      os << "non-finite control at step " << n << " (t=" << t << ", x=" << x << ", z=" << z << ")";
      throw NumericalError(os.str());
    }
    if (x < gamma2_) z += dt;
    const double eps = normals.at(std::uint64_t(n));
    x = x + (c.drift + c.diffusion * zeta) * dt + c.diffusion * sdt * eps;
    x = std::max(x, 0.0);
    ll += -0.5 * dt * zeta * zeta - sdt * eps * zeta;
    rec(n + 1, x, z);
  }
  return {x, z, ll};
}

FadeSample ProjectedSimulator::run(double r0, RngStream rng) const {
  return integrate(r0, rng, ZeroControl{}, NoRecord{});
}

void ProjectedSimulator::run(double r0, RngStream rng, FadePath& out) const {
  prepare(out, grid_);
  out.log_likelihood = integrate(r0, rng, ZeroControl{}, PathRecord{out}).log_likelihood;
}

FadeSample ProjectedSimulator::run_controlled(double r0, RngStream rng, const ControlFn& control) const {
  return integrate(r0, rng, control, NoRecord{});
}

void ProjectedSimulator::run_controlled(double r0, RngStream rng, const ControlFn& control, FadePath& out) const {
  prepare(out, grid_);
  out.log_likelihood = integrate(r0, rng, control, PathRecord{out}).log_likelihood;
}

FadePath simulate_iq_fade(const OuParams& p, double gamma, const TimeGrid& grid, RngStream rng) {
  FadePath out;
  IqSimulator(p, gamma, grid).run(rng, out);
  return out;
}

FadePath simulate_projected_fade(const ProjectedModel& model, double r0, double gamma, const TimeGrid& grid,
                                 RngStream rng) {
  FadePath out;
  ProjectedSimulator(model, gamma, grid).run(r0, rng, out);
  return out;
}

FadePath simulate_controlled_fade(const ProjectedModel& model, const ControlFn& control, double r0, double gamma,
                                  const TimeGrid& grid, RngStream rng) {
  FadePath out;
  ProjectedSimulator(model, gamma, grid).run_controlled(r0, rng, control, out);
  return out;
}

}  // namespace fadesim
