#include "experiments/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>

#include "errors.hpp"
#include "fade_duration_mc.hpp"
#include "importance_sampling.hpp"
#include "kbe_solver.hpp"
#include "output.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "summation.hpp"
#include "validation.hpp"

namespace fadesim {

// generated from configs/*.json at build time
const std::vector<std::pair<std::string, std::string>>& embedded_targets();

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

unsigned workers_of(const ExperimentConfig& c) { return c.workers ? c.workers : default_workers(); }

TimeGrid time_grid(const ExperimentConfig& c) {
  TimeGrid g{c.T, c.N};
  validate(g);
  return g;
}

bool wants(const ExperimentConfig& c, const char* system) { return c.system == "both" || c.system == system; }

void require_rayleigh(const ExperimentConfig& c, const std::string& what) {
  if (c.model.cls != "rayleigh") {
    throw ConfigError(what + " needs the rayleigh model: the optimal control and its value grid exist only for Rayleigh fading");
  }
}

class Outputs {
 public:
  Outputs(const std::string& command, const ExperimentConfig& cfg, RunReport& report)
      : command_(command), cfg_(cfg), report_(report) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out + ": " + ec.message());
  }

  std::string path(const std::string& name) const { return cfg_.output_path(name); }

  void done(const std::string& file, const json& extra, std::ostream& log) {
    json meta = {{"command", command_},
                 {"file", fs::path(file).filename().string()},
                 {"version", version_string()},
                 {"build", build_id()},
                 {"config_hash", config_hash(cfg_)},
                 {"seed", cfg_.seed},
                 {"config", to_json(cfg_)}};
    if (!extra.is_null()) meta["result"] = extra;
    write_sidecar(file, meta);
    report_.files.push_back(file);
    report_.files.push_back(file + ".json");
    log << "wrote " << file << '\n';
  }

 private:
  std::string command_;
  const ExperimentConfig& cfg_;
  RunReport& report_;
};

// Law of I(T)^2 + Q(T)^2 from the transient moments, when it has a closed form here.
std::optional<Law> final_law(const OuParams& p, double t) {
  const Moments mi = transient_moments(p, t, Component::I);
  const Moments mq = transient_moments(p, t, Component::Q);
  if (mi.mean == 0.0 && mq.mean == 0.0) {
    if (mi.variance == mq.variance) return Law::exponential(2.0 * mi.variance);
    return Law::squared_hoyt(mi.variance, mq.variance);
  }
  if (mi.mean == mq.mean && mi.variance == mq.variance) return Law::squared_rice(mi.mean, mi.variance);
  return std::nullopt;
}

std::vector<double> final_r(const PathSampler& s, std::uint64_t m, unsigned workers) {
  const std::vector<FadeSample> xs = sample_paths(s, m, workers);
  std::vector<double> r(xs.size());
  std::transform(xs.begin(), xs.end(), r.begin(), [](const FadeSample& f) { return f.r; });
  return r;
}

void write_path(const std::string& file, const FadePath& path) {
  CsvWriter csv(file, {"t", "r", "z"});
  for (std::size_t n = 0; n < path.r_values.size(); ++n) {
    csv.row(path.grid.time(int(n)), path.r_values[n], path.z_values[n]);
  }
}

RunReport cmd_simulate(const ExperimentConfig& c, std::ostream& log) {
  RunReport rep;
  Outputs out("simulate", c, rep);
  const TimeGrid grid = time_grid(c);
  if (wants(c, "projected")) {
    const ProjectedModel model = c.model.projected();
    for (std::uint64_t k : c.paths) {
      const std::string f = out.path("path_projected_" + std::to_string(k) + ".csv");
      write_path(f, simulate_projected_fade(model, model.r0(), c.gamma, grid, {c.seed, k}));
      out.done(f, {{"system", "projected"}, {"path", k}}, log);
    }
  }
  if (wants(c, "iq")) {
    const OuParams p = c.model.iq_params();
    for (std::uint64_t k : c.paths) {
      const std::string f = out.path("path_iq_" + std::to_string(k) + ".csv");
      write_path(f, simulate_iq_fade(p, c.gamma, grid, {c.seed, k}));
      out.done(f, {{"system", "iq"}, {"path", k}}, log);
    }
  }
  return rep;
}

RunReport cmd_hist(const ExperimentConfig& c, std::ostream& log) {
  RunReport rep;
  Outputs out("hist", c, rep);
  const TimeGrid grid = time_grid(c);
  const unsigned workers = workers_of(c);
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  std::optional<ProjectedModel> model;
  if (wants(c, "projected")) {
    model = c.model.projected();
    const ProjectedSimulator sim(*model, c.gamma, grid);
    samples.emplace_back("projected", final_r(projected_sampler(sim, model->r0(), c.seed), c.M, workers));
  }
  if (wants(c, "iq")) {
    const IqSimulator sim(c.model.iq_params(), c.gamma, grid);
    samples.emplace_back("iq", final_r(iq_sampler(sim, c.seed), c.M, workers));
  }
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [name, xs] : samples) {
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    lo = std::min(lo, *mn);
    hi = std::max(hi, *mx);
  }
  const std::optional<Law> law = final_law(c.model.iq_params(), c.T);

  const std::string f = out.path("hist.csv");
  {
    CsvWriter csv(f, {"system", "bin", "lo", "hi", "count", "density", "law_pdf"});
    for (const auto& [name, xs] : samples) {
      const Histogram h = fade_histogram(xs, c.bins, lo, hi);
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double mid = 0.5 * (h.edges[b] + h.edges[b + 1]);
        csv.row(name, b, h.edges[b], h.edges[b + 1], h.counts[b], h.density(b), law ? law->pdf(mid) : NAN);
      }
    }
  }
  out.done(f, {{"law", law ? law->name() : "none"}, {"samples", c.M}}, log);

  std::vector<GofReport> gof;
  if (samples.size() == 2) gof.push_back(ks_report("ks_projected_vs_iq", samples[0].second, samples[1].second));
  if (law) {
    for (const auto& [name, xs] : samples) {
      GofReport g = gof_stationary(xs, *law);
      g.test = "ks_" + name + "_vs_" + law->name();
      gof.push_back(g);
    }
  }
  for (auto& g : gof) g.seed = c.seed;
  const std::string fg = out.path("hist_gof.csv");
  write_gof_csv(fg, gof);
  json res = json::array();
  for (const auto& g : gof) res.push_back({{"test", g.test}, {"statistic", g.statistic}, {"threshold", g.threshold}});
  out.done(fg, res, log);
  rep.summary["gof"] = res;
  return rep;
}

CcdfEstimate run_mc(const ExperimentConfig& c, const std::string& system, std::uint64_t m) {
  const TimeGrid grid = time_grid(c);
  const McOptions opt{m, c.confidence, workers_of(c)};
  if (system == "iq") {
    const IqSimulator sim(c.model.iq_params(), c.gamma, grid);
    return mc_ccdf(iq_sampler(sim, c.seed), c.w, opt);
  }
  const ProjectedModel model = c.model.projected();
  const ProjectedSimulator sim(model, c.gamma, grid);
  return mc_ccdf(projected_sampler(sim, model.r0(), c.seed), c.w, opt);
}

RunReport cmd_ccdf_mc(const ExperimentConfig& c, std::ostream& log) {
  RunReport rep;
  Outputs out("ccdf-mc", c, rep);
  std::vector<std::pair<std::string, CcdfEstimate>> est;
  for (const char* s : {"projected", "iq"}) {
    if (wants(c, s)) est.emplace_back(s, run_mc(c, s, c.M));
  }
  const std::string f = out.path("ccdf_mc.csv");
  json res = json::object();
  {
    CsvWriter csv(f, {"system", "estimator", "w", "p_hat", "variance", "rel_error", "ci_halfwidth", "M",
                      "jump_at_zero"});
    for (const auto& [name, e] : est) {
      for (std::size_t k = 0; k < e.w.size(); ++k) {
        csv.row(name, "mc", e.w[k], e.p_hat[k], e.variance[k], e.rel_error[k], e.ci_halfwidth[k], e.m_samples,
                e.jump_at_zero);
      }
      res["jump_at_zero_" + name] = e.jump_at_zero;
    }
  }
  if (est.size() == 2) {
    double gap = 0.0;
    for (std::size_t k = 0; k < c.w.size(); ++k) {
      gap = std::max(gap, std::fabs(est[0].second.p_hat[k] - est[1].second.p_hat[k]));
    }
    res["sup_gap"] = gap;
  }
  out.done(f, res, log);
  rep.summary = res;
  return rep;
}

KbeGridConfig kbe_config(const ExperimentConfig& c) {
  KbeGridConfig k;
  k.T = c.T;
  k.nt = c.kbe.nt;
  k.nx = c.kbe.nx;
  k.xb = c.kbe.xb;
  k.B = c.model.rayleigh.B;
  k.sigma = c.model.rayleigh.sigma;
  k.gamma = c.gamma;
  return resolve(k);
}

double rayleigh_r0(const ExperimentConfig& c) {
  return c.model.rayleigh.i0 * c.model.rayleigh.i0 + c.model.rayleigh.q0 * c.model.rayleigh.q0;
}

RunReport cmd_kbe_solve(const ExperimentConfig& c, std::ostream& log) {
  require_rayleigh(c, "kbe-solve");
  RunReport rep;
  Outputs out("kbe-solve", c, rep);
  const ValueFunctionGrid grid = solve_kbe(kbe_config(c));
  const GridCheck chk = check_invariants(grid);
  const std::string base = c.grid_base();
  if (fs::path(base).has_parent_path()) fs::create_directories(fs::path(base).parent_path());
  save_grid(grid, base);
  rep.files.push_back(base + ".json");
  rep.files.push_back(base + ".bin");
  log << "wrote " << base << ".json/.bin (" << format_double(grid.diagnostics.seconds) << " s)\n";
  if (grid.diagnostics.gradient_at_xb > 1e-6) {
    log << "note: |dv/dx| at xb is " << format_double(grid.diagnostics.gradient_at_xb)
        << "; increase kbe.xb if the value near x0 moves when xb doubles\n";
  }
  for (const auto& msg : chk.failures) log << "invariant: " << msg << '\n';

  const double r0 = rayleigh_r0(c);
  const std::string f = out.path("kbe_curve.csv");
  {
    CsvWriter csv(f, {"w", "v"});
    for (double w : c.w) csv.row(w, value_at(grid, 0.0, r0, 0.0, w));
  }
  rep.summary = {{"grid", base},
                 {"invariants_ok", chk.ok},
                 {"min_pre_clamp", grid.diagnostics.min_pre_clamp},
                 {"max_pre_clamp", grid.diagnostics.max_pre_clamp},
                 {"gradient_at_xb", grid.diagnostics.gradient_at_xb},
                 {"seconds", grid.diagnostics.seconds}};
  out.done(f, rep.summary, log);
  return rep;
}

ValueFunctionGrid open_grid(const ExperimentConfig& c) {
  const std::string base = c.grid_base();
  if (!fs::exists(base + ".json") || !fs::exists(base + ".bin")) {
    throw IoError("value grid " + base + ".json/.bin not found; run `fadesim kbe-solve` with the same model, T, gamma"
                  " and kbe options first");
  }
  return load_grid(base, false);
}

std::vector<IsEstimate> run_is(const ExperimentConfig& c, const ValueFunctionGrid& grid) {
  const ProjectedModel model = c.model.projected();
  const ProjectedSimulator sim(model, c.gamma, time_grid(c));
  IsOptions opt;
  opt.samples = c.M_is;
  opt.seed = c.seed;
  opt.confidence = c.confidence;
  opt.workers = workers_of(c);
  opt.v_floor = c.kbe.v_floor;
  opt.zeta_cap = c.kbe.zeta_cap;
  std::vector<IsEstimate> out;
  for (double w : c.w) out.push_back(is_estimate(model, sim, model.r0(), grid, w, opt));
  return out;
}

RunReport cmd_ccdf_is(const ExperimentConfig& c, std::ostream& log) {
  require_rayleigh(c, "ccdf-is");
  RunReport rep;
  Outputs out("ccdf-is", c, rep);
  const ValueFunctionGrid grid = open_grid(c);
  const std::vector<IsEstimate> est = run_is(c, grid);
  const std::string f = out.path("ccdf_is.csv");
  {
    CsvWriter csv(f, {"system", "estimator", "w", "p_hat", "variance", "rel_error", "ci_halfwidth", "M", "hits",
                      "max_term_share", "degenerate"});
    for (const IsEstimate& e : est) {
      csv.row("projected", "is", e.w, e.p_hat, e.variance, e.rel_error, e.ci_halfwidth, e.m_samples, e.hits,
              e.max_term_share, int(e.degenerate));
      if (e.degenerate) log << "w=" << format_double(e.w) << ": no path reached the event (degenerate)\n";
    }
  }
  out.done(f, {{"grid", c.grid_base()}}, log);
  return rep;
}

RunReport cmd_compare(const ExperimentConfig& c, std::ostream& log) {
  require_rayleigh(c, "compare");
  RunReport rep;
  Outputs out("compare", c, rep);
  const ValueFunctionGrid grid = open_grid(c);
  const CcdfEstimate mc = run_mc(c, "projected", c.M);
  const std::vector<IsEstimate> is = run_is(c, grid);
  const std::vector<ComparisonRow> rows = estimator_comparison(mc, is, c.target_rel_error);
  const std::string f = out.path("compare.csv");
  json res = json::array();
  {
    CsvWriter csv(f, {"w", "A_MC", "A_IS", "Var_MC", "Var_IS", "relerr_MC", "relerr_IS", "M_needed_MC",
                      "M_needed_IS", "ci_MC", "ci_IS", "M_MC", "M_IS"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const ComparisonRow& r = rows[k];
      csv.row(r.w, r.a_mc, r.a_is, r.var_mc, r.var_is, r.relerr_mc, r.relerr_is, r.m_needed_mc, r.m_needed_is,
              mc.ci_halfwidth[k], is[k].ci_halfwidth, mc.m_samples, is[k].m_samples);
      res.push_back({{"w", r.w}, {"A_MC", r.a_mc}, {"A_IS", r.a_is}, {"Var_MC", r.var_mc}, {"Var_IS", r.var_is}});
    }
  }
  out.done(f, {{"grid", c.grid_base()}, {"target_rel_error", c.target_rel_error}}, log);
  rep.summary["rows"] = res;
  return rep;
}

RunReport cmd_stats(const ExperimentConfig& c, std::ostream& log) {
  require_rayleigh(c, "stats");
  RunReport rep;
  Outputs out("stats", c, rep);
  const RayleighParams& p = c.model.rayleigh;
  const double dt = c.stats.dt;
  const int burn = int(std::lround(c.stats.burn_in / dt));
  std::vector<int> lag_steps;
  for (double l : c.stats.lags) lag_steps.push_back(std::max(1, int(std::lround(l / dt))));
  const int total = burn + *std::max_element(lag_steps.begin(), lag_steps.end());
  const TimeGrid grid{total * dt, total};
  validate(grid);
  const ProjectedModel model = ProjectedModel::rayleigh(p);
  const ProjectedSimulator sim(model, c.gamma, grid);
  const double r0 = model.r0();

  // per chunk: x, x^2 at burn-in; x0*xl and xl per lag
  struct Acc {
    CompensatedSum s1, s2, s3, s4;
    std::vector<CompensatedSum> prod, lag1, prod2;
  };
  const std::uint64_t chunk = 4096;
  const std::uint64_t chunks = (c.M + chunk - 1) / chunk;
  std::vector<Acc> acc(chunks);
  const std::size_t nl = lag_steps.size();
  // Centering by the closed-form mean keeps the sums well conditioned.
  const double centre = p.sigma * p.sigma;
  for_each_chunk(c.M, chunk, workers_of(c), [&](std::uint64_t b, std::uint64_t e, std::uint64_t ci) {
    Acc& a = acc[ci];
    a.prod.resize(nl);
    a.lag1.resize(nl);
    a.prod2.resize(nl);
    FadePath path;
    for (std::uint64_t k = b; k < e; ++k) {
      sim.run(r0, {c.seed, k}, path);
      const double x = path.r_values[burn] - centre;
      a.s1.add(x);
      a.s2.add(x * x);
      a.s3.add(x * x * x);
      a.s4.add(x * x * x * x);
      for (std::size_t l = 0; l < nl; ++l) {
        const double y = path.r_values[burn + lag_steps[l]] - centre;
        a.prod[l].add(x * y);
        a.lag1[l].add(y);
        a.prod2[l].add(x * y * x * y);
      }
    }
  });
  CompensatedSum s1, s2, s3, s4;
  std::vector<CompensatedSum> prod(nl), lag1(nl), prod2(nl);
  for (const Acc& a : acc) {
    s1.add(a.s1.value());
    s2.add(a.s2.value());
    s3.add(a.s3.value());
    s4.add(a.s4.value());
    for (std::size_t l = 0; l < nl; ++l) {
      prod[l].add(a.prod[l].value());
      lag1[l].add(a.lag1[l].value());
      prod2[l].add(a.prod2[l].value());
    }
  }
  const double m = double(c.M);
  const double mu = s1.value() / m;
  const double var = s2.value() / m - mu * mu;
  const double c4 = s4.value() / m - 4 * mu * s3.value() / m + 6 * mu * mu * s2.value() / m - 3 * mu * mu * mu * mu;
  const double t0 = burn * dt;

  const std::string f = out.path("stats.csv");
  json res = json::array();
  {
    CsvWriter csv(f, {"quantity", "lag", "empirical", "std_error", "closed_form", "stationary"});
    auto emit = [&](const std::string& q, double lag, double emp, double se, double closed, double stat) {
      csv.row(q, lag, emp, se, closed, stat);
      res.push_back({{"quantity", q}, {"lag", lag}, {"empirical", emp}, {"std_error", se}, {"closed_form", closed},
                     {"stationary", stat}});
    };
    const double s2v = p.sigma * p.sigma;
    emit("mean", 0.0, mu + centre, std::sqrt(var / m), rbar_mean(p, t0, r0), s2v);
    emit("variance", 0.0, var, std::sqrt(std::max(0.0, c4 - var * var) / m), rbar_autocovariance(p, t0, 0.0, r0),
         s2v * s2v);
    for (std::size_t l = 0; l < nl; ++l) {
      const double lag = lag_steps[l] * dt;
      const double pm = prod[l].value() / m;
      const double cov = pm - mu * lag1[l].value() / m;
      const double se = std::sqrt(std::max(0.0, prod2[l].value() / m - pm * pm) / m);
      emit("autocovariance", lag, cov, se, rbar_autocovariance(p, t0, lag, r0), s2v * s2v * std::exp(-p.B * lag));
    }
  }
  out.done(f, {{"burn_in", t0}, {"dt", dt}}, log);
  rep.summary["rows"] = res;
  return rep;
}

double law_quantile(const Law& law, double q, double hint) {
  // bracket, then bisect on the quadrature CDF
  double hi = std::max(hint, 1e-6);
  auto cdf = [&](double x) { return integrate([&](double y) { return law.pdf(y); }, 0.0, x, 1e-10, "law cdf"); };
  while (cdf(hi) < q) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RunReport cmd_drift(const ExperimentConfig& c, std::ostream& log) {
  const ProjectedModel model = c.model.projected();
  if (model.kind() != FadingKind::Rice) {
    throw ConfigError("drift compares the exact and affine Rice drifts; the model is " + std::string(to_string(model.kind())));
  }
  RunReport rep;
  Outputs out("drift", c, rep);
  const OuParams& p = model.ou();
  const std::string f = out.path("drift.csv");
  json res = json::array();
  double worst = 0.0;
  {
    CsvWriter csv(f, {"s", "r", "cond_exp_exact", "cond_exp_affine", "drift_exact", "drift_affine", "rel_gap",
                      "in_bulk"});
    for (double s : c.drift.times) {
      const Moments mi = transient_moments(p, s, Component::I);
      const Law law = Law::squared_rice(mi.mean, mi.variance);
      const double mean_r = 2.0 * (mi.mean * mi.mean + mi.variance);
      // bulk of R(s): central 98%
      const double r_lo = law_quantile(law, 0.01, mean_r);
      const double r_hi = law_quantile(law, 0.99, mean_r);
      const double top = law_quantile(law, 0.999, mean_r);
      double gap_s = 0.0;
      for (int k = 1; k <= c.drift.points; ++k) {
        const double r = top * k / c.drift.points;
        const double ee = rice_cond_exp(mi.mean, mi.variance, r, RiceMode::Exact);
        const double ea = rice_cond_exp(mi.mean, mi.variance, r, RiceMode::Affine);
        const double de = rice_coeffs(p, s, r, RiceMode::Exact).drift;
        const double da = rice_coeffs(p, s, r, RiceMode::Affine).drift;
        const double gap = ee != 0.0 ? std::fabs(ea - ee) / std::fabs(ee) : NAN;
        const bool bulk = r >= r_lo && r <= r_hi;
        if (bulk && std::isfinite(gap)) gap_s = std::max(gap_s, gap);
        csv.row(s, r, ee, ea, de, da, gap, int(bulk));
      }
      worst = std::max(worst, gap_s);
      res.push_back({{"s", s}, {"r_lo", r_lo}, {"r_hi", r_hi}, {"max_rel_gap", gap_s}});
    }
  }
  out.done(f, {{"per_time", res}, {"max_rel_gap", worst}}, log);
  rep.summary = {{"per_time", res}, {"max_rel_gap", worst}};
  return rep;
}

using Command = RunReport (*)(const ExperimentConfig&, std::ostream&);

const std::map<std::string, Command>& command_table() {
  static const std::map<std::string, Command> t{{"simulate", cmd_simulate}, {"hist", cmd_hist},
                                                {"ccdf-mc", cmd_ccdf_mc},     {"kbe-solve", cmd_kbe_solve},
                                                {"ccdf-is", cmd_ccdf_is},     {"compare", cmd_compare},
                                                {"stats", cmd_stats},         {"drift", cmd_drift}};
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "hist",    "ccdf-mc", "kbe-solve",
                                              "ccdf-is",  "compare", "stats",   "drift"};
  return names;
}

RunReport run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log) {
  const auto it = command_table().find(subcommand);
  if (it == command_table().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second(cfg, log);
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> reproduce_targets() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : embedded_targets()) ids.push_back(id);
  return ids;
}

std::string reproduce_source(const std::string& id) {
  for (const auto& [name, text] : embedded_targets()) {
    if (name == id) return text;
  }
  std::string known;
  for (const auto& n : reproduce_targets()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown reproduce target '" + id + "' (known: " + known + ")");
}

RunReport run_reproduce(const std::string& id, const ReproduceOptions& opt, std::ostream& log) {
  const json target = json::parse(reproduce_source(id));
  const std::string dir = (fs::path(opt.out.empty() ? "out" : opt.out) / id).string();
  RunReport all;
  all.summary = json::object();
  int step = 0;
  for (const json& s : target.at("steps")) {
    ++step;
    const std::string command = s.at("command").get<std::string>();
    json overrides = {{"out", dir}};
    if (opt.seed) overrides["seed"] = *opt.seed;
    if (opt.workers) overrides["workers"] = opt.workers;
    const std::string text = s.at("config").dump(2);
    const ConfigResult cr = validate_config(text, overrides);
    if (!cr.config) {
      std::string msg = "reproduce " + id + " step " + std::to_string(step) + ":";
      for (const auto& is : cr.issues) msg += "\n  " + is.str(id);
      throw ConfigError(msg);
    }
    log << "[" << id << " " << step << "/" << target.at("steps").size() << "] " << command << '\n';
    RunReport r = run_experiment(command, *cr.config, log);
    all.files.insert(all.files.end(), r.files.begin(), r.files.end());
    const std::string key = cr.config->label.empty() ? command : cr.config->label + "_" + command;
    all.summary[key] = r.summary;
  }
  return all;
}

}  // namespace fadesim
