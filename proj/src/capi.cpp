#include "fadesim/fadesim.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <ostream>
#include <streambuf>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "experiments/config.hpp"
#include "experiments/runner.hpp"
#include "fade_duration_mc.hpp"
#include "importance_sampling.hpp"
#include "kbe_solver.hpp"
#include "markovian_projection.hpp"
#include "output.hpp"
#include "special_functions.hpp"

struct fadesim_model {
  fadesim::ProjectedModel model;
};

struct fadesim_grid {
  fadesim::ValueFunctionGrid grid;
};

namespace {

using json = nlohmann::json;

thread_local std::string g_last_error;

fadesim_status fail(fadesim_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Maps exceptions from the core onto status codes.
template <class Fn>
fadesim_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return FADESIM_OK;
  } catch (const fadesim::ConfigError& e) {
    return fail(FADESIM_ERR_CONFIG, e.what());
  } catch (const fadesim::DomainError& e) {
    return fail(FADESIM_ERR_DOMAIN, e.what());
  } catch (const fadesim::NumericalError& e) {
    return fail(FADESIM_ERR_NUMERICAL, e.what());
  } catch (const fadesim::IoError& e) {
    return fail(FADESIM_ERR_IO, e.what());
  } catch (const json::exception& e) {
    return fail(FADESIM_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(FADESIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FADESIM_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Forwards complete lines to a log callback; unbuffered, so progress shows up live.
class LineBuf : public std::streambuf {
 public:
  LineBuf(fadesim_log_fn fn, void* user) : fn_(fn), user_(user) {}
  ~LineBuf() override {
    if (!line_.empty() && fn_) fn_(line_.c_str(), user_);
  }

 protected:
  int_type overflow(int_type ch) override {
    if (ch == traits_type::eof()) return traits_type::not_eof(ch);
    if (ch == '\n') {
      if (fn_) fn_(line_.c_str(), user_);
      line_.clear();
    } else {
      line_.push_back(char(ch));
    }
    return ch;
  }

 private:
  fadesim_log_fn fn_;
  void* user_;
  std::string line_;
};

json parse_overrides(const char* overrides) {
  if (!overrides || !*overrides) return json::object();
  json j = json::parse(overrides);
  if (!j.is_object()) throw fadesim::ConfigError("overrides must be a JSON object");
  return j;
}

fadesim::ExperimentConfig checked_config(const char* text, const char* overrides, const char* source_name,
                                         const char* default_out, json* resolved) {
  const fadesim::ConfigResult r =
      fadesim::validate_config(text ? text : "", parse_overrides(overrides), default_out ? default_out : "");
  if (resolved) *resolved = r.resolved;
  if (!r.config) {
    std::string msg = std::to_string(r.issues.size()) + " configuration error(s):";
    for (const auto& is : r.issues) msg += "\n  " + is.str(source_name ? source_name : "");
    throw fadesim::ConfigError(msg);
  }
  return *r.config;
}

json report_json(const fadesim::RunReport& r) { return {{"files", r.files}, {"summary", r.summary}}; }

fadesim::TimeGrid time_grid(double T, int N) {
  fadesim::TimeGrid g{T, N};
  fadesim::validate(g);
  return g;
}

}  // namespace

extern "C" {

const char* fadesim_version(void) {
  static const std::string v = fadesim::version_string();
  return v.c_str();
}

const char* fadesim_build_id(void) {
  static const std::string b = fadesim::build_id();
  return b.c_str();
}

const char* fadesim_last_error(void) { return g_last_error.c_str(); }

const char* fadesim_status_name(fadesim_status s) {
  switch (s) {
    case FADESIM_OK: return "ok";
    case FADESIM_ERR_CONFIG: return "configuration error";
    case FADESIM_ERR_DOMAIN: return "domain error";
    case FADESIM_ERR_NUMERICAL: return "numerical error";
    case FADESIM_ERR_IO: return "i/o error";
    case FADESIM_ERR_NULL: return "null argument";
    case FADESIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void fadesim_string_free(char* s) { std::free(s); }

fadesim_status fadesim_bessel_i0_scaled(double x, double* out) {
  if (!out) return fail(FADESIM_ERR_NULL, "out is NULL");
  return guarded([&] { *out = fadesim::bessel_i0_scaled(x); });
}

fadesim_status fadesim_bessel_i1_scaled(double x, double* out) {
  if (!out) return fail(FADESIM_ERR_NULL, "out is NULL");
  return guarded([&] { *out = fadesim::bessel_i1_scaled(x); });
}

fadesim_status fadesim_model_rayleigh(double B, double sigma, double i0, double q0, fadesim_model** out) {
  if (!out) return fail(FADESIM_ERR_NULL, "out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new fadesim_model{fadesim::ProjectedModel::rayleigh({B, sigma, i0, q0})}; });
}

fadesim_status fadesim_model_from_ou(const fadesim_ou_params* p, int rice_exact, fadesim_model** out) {
  if (!p || !out) return fail(FADESIM_ERR_NULL, "p or out is NULL");
  *out = nullptr;
  return guarded([&] {
    const fadesim::OuParams o{p->k1, p->k2, p->theta1, p->theta2, p->beta1, p->beta2, p->i0, p->q0};
    const auto mode = rice_exact ? fadesim::RiceMode::Exact : fadesim::RiceMode::Affine;
    *out = new fadesim_model{fadesim::ProjectedModel::from_ou(o, mode)};
  });
}

void fadesim_model_free(fadesim_model* m) { delete m; }

fadesim_status fadesim_model_kind(const fadesim_model* m, fadesim_kind* out) {
  if (!m || !out) return fail(FADESIM_ERR_NULL, "model or out is NULL");
  *out = static_cast<fadesim_kind>(static_cast<int>(m->model.kind()));
  return FADESIM_OK;
}

fadesim_status fadesim_model_coeffs(const fadesim_model* m, double s, double r, double* drift, double* diffusion) {
  if (!m || !drift || !diffusion) return fail(FADESIM_ERR_NULL, "model or outputs are NULL");
  return guarded([&] {
    const fadesim::Coeffs c = m->model.coeffs(s, r);
    *drift = c.drift;
    *diffusion = c.diffusion;
  });
}

fadesim_status fadesim_simulate(const fadesim_model* m, fadesim_system system, double gamma, double T, int N,
                                uint64_t seed, uint64_t stream, double* r, double* z) {
  if (!m || !r || !z) return fail(FADESIM_ERR_NULL, "model or outputs are NULL");
  return guarded([&] {
    const fadesim::TimeGrid grid = time_grid(T, N);
    const fadesim::FadePath path =
        system == FADESIM_SYSTEM_IQ
            ? fadesim::simulate_iq_fade(m->model.ou(), gamma, grid, {seed, stream})
            : fadesim::simulate_projected_fade(m->model, m->model.r0(), gamma, grid, {seed, stream});
    std::copy(path.r_values.begin(), path.r_values.end(), r);
    std::copy(path.z_values.begin(), path.z_values.end(), z);
  });
}

fadesim_status fadesim_mc_ccdf(const fadesim_model* m, fadesim_system system, double gamma, double T, int N,
                               uint64_t M, uint64_t seed, unsigned workers, const double* w, size_t nw,
                               double* p_hat, double* variance, double* jump_at_zero) {
  if (!m || (nw && (!w || !p_hat))) return fail(FADESIM_ERR_NULL, "model, w or p_hat is NULL");
  return guarded([&] {
    if (M == 0) throw fadesim::ConfigError("M must be >= 1");
    const fadesim::TimeGrid grid = time_grid(T, N);
    const std::vector<double> wv(w, w + nw);
    const fadesim::McOptions opt{M, fadesim::kConfidence95, workers ? workers : 1u};
    fadesim::CcdfEstimate e;
    if (system == FADESIM_SYSTEM_IQ) {
      const fadesim::IqSimulator sim(m->model.ou(), gamma, grid);
      e = fadesim::mc_ccdf(fadesim::iq_sampler(sim, seed), wv, opt);
    } else {
      const fadesim::ProjectedSimulator sim(m->model, gamma, grid);
      e = fadesim::mc_ccdf(fadesim::projected_sampler(sim, m->model.r0(), seed), wv, opt);
    }
    std::copy(e.p_hat.begin(), e.p_hat.end(), p_hat);
    if (variance) std::copy(e.variance.begin(), e.variance.end(), variance);
    if (jump_at_zero) *jump_at_zero = e.jump_at_zero;
  });
}

fadesim_status fadesim_kbe_solve(const fadesim_kbe_config* cfg, fadesim_grid** out) {
  if (!cfg || !out) return fail(FADESIM_ERR_NULL, "cfg or out is NULL");
  *out = nullptr;
  return guarded([&] {
    fadesim::KbeGridConfig k;
    k.T = cfg->T;
    k.nt = cfg->nt;
    k.nx = cfg->nx;
    k.xb = cfg->xb;
    k.B = cfg->B;
    k.sigma = cfg->sigma;
    k.gamma = cfg->gamma;
    *out = new fadesim_grid{fadesim::solve_kbe(fadesim::resolve(k))};
  });
}

fadesim_status fadesim_grid_load(const char* base, int check, fadesim_grid** out) {
  if (!base || !out) return fail(FADESIM_ERR_NULL, "base or out is NULL");
  *out = nullptr;
  return guarded([&] { *out = new fadesim_grid{fadesim::load_grid(base, check != 0)}; });
}

fadesim_status fadesim_grid_save(const fadesim_grid* g, const char* base) {
  if (!g || !base) return fail(FADESIM_ERR_NULL, "grid or base is NULL");
  return guarded([&] { fadesim::save_grid(g->grid, base); });
}

void fadesim_grid_free(fadesim_grid* g) { delete g; }

fadesim_status fadesim_grid_value(const fadesim_grid* g, double t, double x, double z, double w, double* out) {
  if (!g || !out) return fail(FADESIM_ERR_NULL, "grid or out is NULL");
  return guarded([&] { *out = fadesim::value_at(g->grid, t, x, z, w); });
}

fadesim_status fadesim_grid_control(const fadesim_grid* g, double t, double x, double z, double w, double* out) {
  if (!g || !out) return fail(FADESIM_ERR_NULL, "grid or out is NULL");
  return guarded([&] {
    const fadesim::ControlPolicy policy{&g->grid, w};
    *out = fadesim::control_at(policy, t, x, z);
  });
}

fadesim_status fadesim_is_estimate(const fadesim_model* m, const fadesim_grid* g, double gamma, int N, double w,
                                   uint64_t M, uint64_t seed, unsigned workers, fadesim_is_result* out) {
  if (!m || !g || !out) return fail(FADESIM_ERR_NULL, "model, grid or out is NULL");
  return guarded([&] {
    if (M < 2) throw fadesim::ConfigError("M must be >= 2");
    const fadesim::ProjectedSimulator sim(m->model, gamma, time_grid(g->grid.config().T, N));
    fadesim::IsOptions opt;
    opt.samples = M;
    opt.seed = seed;
    opt.workers = workers ? workers : 1u;
    const fadesim::IsEstimate e = fadesim::is_estimate(m->model, sim, m->model.r0(), g->grid, w, opt);
    *out = {e.w, e.p_hat, e.variance, e.rel_error, e.ci_halfwidth, e.m_samples, e.hits, e.max_term_share,
            e.degenerate ? 1 : 0};
  });
}

fadesim_status fadesim_validate_config(const char* text, const char* overrides, const char* source_name,
                                       const char* default_out, char** resolved) {
  if (resolved) *resolved = nullptr;
  return guarded([&] {
    json res;
    const fadesim::ExperimentConfig cfg = checked_config(text, overrides, source_name, default_out, &res);
    if (resolved) *resolved = dup_string(fadesim::to_json(cfg).dump(2));
  });
}

fadesim_status fadesim_run(const char* subcommand, const char* text, const char* overrides, const char* source_name,
                           const char* default_out, fadesim_log_fn log, void* user, char** report) {
  if (!subcommand) return fail(FADESIM_ERR_NULL, "subcommand is NULL");
  if (report) *report = nullptr;
  return guarded([&] {
    const fadesim::ExperimentConfig cfg = checked_config(text, overrides, source_name, default_out, nullptr);
    LineBuf buf(log, user);
    std::ostream os(&buf);
    const fadesim::RunReport r = fadesim::run_experiment(subcommand, cfg, os);
    os.flush();
    if (report) *report = dup_string(report_json(r).dump(2));
  });
}

fadesim_status fadesim_subcommands(char** out) {
  if (!out) return fail(FADESIM_ERR_NULL, "out is NULL");
  return guarded([&] {
    std::string s;
    for (const auto& n : fadesim::subcommands()) s += (s.empty() ? "" : ",") + n;
    *out = dup_string(s);
  });
}

fadesim_status fadesim_reproduce_targets(char** out) {
  if (!out) return fail(FADESIM_ERR_NULL, "out is NULL");
  return guarded([&] {
    std::string s;
    for (const auto& n : fadesim::reproduce_targets()) s += (s.empty() ? "" : ",") + n;
    *out = dup_string(s);
  });
}

fadesim_status fadesim_reproduce(const char* id, int seed_set, uint64_t seed, const char* out, unsigned workers,
                                 fadesim_log_fn log, void* user, char** report) {
  if (!id) return fail(FADESIM_ERR_NULL, "id is NULL");
  if (report) *report = nullptr;
  return guarded([&] {
    fadesim::ReproduceOptions opt;
    if (seed_set) opt.seed = seed;
    opt.out = out ? out : "";
    opt.workers = workers;
    LineBuf buf(log, user);
    std::ostream os(&buf);
    const fadesim::RunReport r = fadesim::run_reproduce(id, opt, os);
    os.flush();
    if (report) *report = dup_string(report_json(r).dump(2));
  });
}

}  // extern "C"
