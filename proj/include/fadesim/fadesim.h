/* C interface to the fadesim library. All functions return a status code; on
 * failure fadesim_last_error() describes the problem (per thread). Strings handed
 * out through char** must be released with fadesim_string_free. */
#ifndef FADESIM_H
#define FADESIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FADESIM_API __declspec(dllexport)
#else
#define FADESIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FADESIM_OK = 0,
  FADESIM_ERR_CONFIG = 1,    /* invalid parameters or configuration */
  FADESIM_ERR_DOMAIN = 2,    /* argument outside a function's domain */
  FADESIM_ERR_NUMERICAL = 3, /* non-finite state, quadrature failure */
  FADESIM_ERR_IO = 4,        /* file missing or unwritable */
  FADESIM_ERR_NULL = 5,      /* required pointer argument was NULL */
  FADESIM_ERR_INTERNAL = 6
} fadesim_status;

typedef enum {
  FADESIM_RAYLEIGH = 0,
  FADESIM_RICE = 1,
  FADESIM_HOYT = 2,
  FADESIM_BECKMANN = 3
} fadesim_kind;

typedef enum { FADESIM_SYSTEM_PROJECTED = 0, FADESIM_SYSTEM_IQ = 1 } fadesim_system;

typedef struct fadesim_model fadesim_model;
typedef struct fadesim_grid fadesim_grid;

typedef struct {
  double k1, k2;
  double theta1, theta2;
  double beta1, beta2;
  double i0, q0;
} fadesim_ou_params;

typedef struct {
  double T;
  int nt, nx;
  double xb; /* 0 selects 12 sigma^2 */
  double B, sigma, gamma;
} fadesim_kbe_config;

typedef struct {
  double w;
  double p_hat;
  double variance; /* single-sample variance of the weighted indicator */
  double rel_error;
  double ci_halfwidth;
  uint64_t m_samples;
  uint64_t hits;
  double max_term_share;
  int degenerate;
} fadesim_is_result;

/* Receives one line of progress output, without the newline. */
typedef void (*fadesim_log_fn)(const char* line, void* user);

FADESIM_API const char* fadesim_version(void);
FADESIM_API const char* fadesim_build_id(void);
FADESIM_API const char* fadesim_last_error(void);
FADESIM_API const char* fadesim_status_name(fadesim_status s);
FADESIM_API void fadesim_string_free(char* s);

FADESIM_API fadesim_status fadesim_bessel_i0_scaled(double x, double* out);
FADESIM_API fadesim_status fadesim_bessel_i1_scaled(double x, double* out);

/* models */
FADESIM_API fadesim_status fadesim_model_rayleigh(double B, double sigma, double i0, double q0, fadesim_model** out);
/* Classifies the parameters; rice_exact selects the quadrature drift for Rice. */
FADESIM_API fadesim_status fadesim_model_from_ou(const fadesim_ou_params* p, int rice_exact, fadesim_model** out);
FADESIM_API void fadesim_model_free(fadesim_model* m);
FADESIM_API fadesim_status fadesim_model_kind(const fadesim_model* m, fadesim_kind* out);
FADESIM_API fadesim_status fadesim_model_coeffs(const fadesim_model* m, double s, double r, double* drift,
                                                double* diffusion);

/* One path on N steps over [0, T]; r and z receive N + 1 values. */
FADESIM_API fadesim_status fadesim_simulate(const fadesim_model* m, fadesim_system system, double gamma, double T,
                                            int N, uint64_t seed, uint64_t stream, double* r, double* z);

/* P(Z(T) > w) for each w (nondecreasing); p_hat and variance receive nw values. */
FADESIM_API fadesim_status fadesim_mc_ccdf(const fadesim_model* m, fadesim_system system, double gamma, double T,
                                           int N, uint64_t M, uint64_t seed, unsigned workers, const double* w,
                                           size_t nw, double* p_hat, double* variance, double* jump_at_zero);

/* value grids */
FADESIM_API fadesim_status fadesim_kbe_solve(const fadesim_kbe_config* cfg, fadesim_grid** out);
FADESIM_API fadesim_status fadesim_grid_load(const char* base, int check, fadesim_grid** out);
FADESIM_API fadesim_status fadesim_grid_save(const fadesim_grid* g, const char* base);
FADESIM_API void fadesim_grid_free(fadesim_grid* g);
FADESIM_API fadesim_status fadesim_grid_value(const fadesim_grid* g, double t, double x, double z, double w,
                                              double* out);
FADESIM_API fadesim_status fadesim_grid_control(const fadesim_grid* g, double t, double x, double z, double w,
                                                double* out);

FADESIM_API fadesim_status fadesim_is_estimate(const fadesim_model* m, const fadesim_grid* g, double gamma, int N,
                                               double w, uint64_t M, uint64_t seed, unsigned workers,
                                               fadesim_is_result* out);

/* experiments */

/* Checks a JSON config (text may be empty) with JSON overrides (may be NULL).
 * On FADESIM_ERR_CONFIG the last error lists every problem with its line. If
 * resolved is non-NULL it receives the effective config as JSON. */
FADESIM_API fadesim_status fadesim_validate_config(const char* text, const char* overrides, const char* source_name,
                                                   const char* default_out, char** resolved);

/* Runs one subcommand (simulate, hist, ccdf-mc, kbe-solve, ccdf-is, compare, stats,
 * drift). report receives {"files": [...], "summary": {...}} when non-NULL. */
FADESIM_API fadesim_status fadesim_run(const char* subcommand, const char* text, const char* overrides,
                                       const char* source_name, const char* default_out, fadesim_log_fn log,
                                       void* user, char** report);

/* Comma-separated subcommand names and reproduce target ids. */
FADESIM_API fadesim_status fadesim_subcommands(char** out);
FADESIM_API fadesim_status fadesim_reproduce_targets(char** out);

/* Runs a pinned target into <out>/<id>; seed_set = 0 keeps the pinned seed. */
FADESIM_API fadesim_status fadesim_reproduce(const char* id, int seed_set, uint64_t seed, const char* out,
                                             unsigned workers, fadesim_log_fn log, void* user, char** report);

#ifdef __cplusplus
}
#endif

#endif
