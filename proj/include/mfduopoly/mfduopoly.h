#ifndef MFDUOPOLY_H
#define MFDUOPOLY_H

/* C interface to the mean-field advertising duopoly solvers.
 *
 * Every function that can fail returns an mfd_status. On failure the message
 * is available from mfd_last_error() on the same thread until the next call
 * that fails. Handles are opaque; each *_destroy accepts NULL. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MFD_BUILDING_SHARED)
#    define MFD_API __declspec(dllexport)
#  else
#    define MFD_API __declspec(dllimport)
#  endif
#else
#  define MFD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfd_status {
  MFD_OK = 0,
  MFD_ERR_INPUT = 1,
  MFD_ERR_UNSUPPORTED = 2, /* distribution cannot serve the request */
  MFD_ERR_SOLVER = 3,
  MFD_ERR_CONSISTENCY = 4, /* closed form and iteration disagree */
  MFD_ERR_IO = 5,
  MFD_ERR_INTERNAL = 6
} mfd_status;

typedef enum mfd_kind { MFD_KIND_NE = 0, MFD_KIND_MLFNE = 1 } mfd_kind;

typedef enum mfd_method {
  MFD_METHOD_CLOSED_FORM = 0,
  MFD_METHOD_BISECTION = 1,
  MFD_METHOD_BR_ITERATION = 2
} mfd_method;

typedef struct mfd_params mfd_params;
typedef struct mfd_dist mfd_dist;
typedef struct mfd_equilibrium mfd_equilibrium;
typedef struct mfd_sweep mfd_sweep;
typedef struct mfd_comparison mfd_comparison;
typedef struct mfd_oracle mfd_oracle;

MFD_API const char* mfd_version(void);
MFD_API const char* mfd_last_error(void);
MFD_API const char* mfd_status_name(mfd_status status);
MFD_API const char* mfd_kind_name(mfd_kind kind);
/* Accepts "ne" / "mlfne" in either case. */
MFD_API mfd_status mfd_kind_parse(const char* text, mfd_kind* out);

/* ---- parameters ---- */

/* Canonical parameters (all unit weights) with advertising cost c. */
MFD_API mfd_status mfd_params_create(double c, mfd_params** out);
/* name: "c", "alpha", "epsilon", "rho1", "rho2", "beta", "eta", "gamma". */
MFD_API mfd_status mfd_params_set(mfd_params* params, const char* name, double value);
MFD_API mfd_status mfd_params_get(const mfd_params* params, const char* name, double* out);
MFD_API void mfd_params_destroy(mfd_params* params);

/* ---- initial preference distributions ---- */

MFD_API mfd_status mfd_dist_mean_only(double mean, mfd_dist** out);
MFD_API mfd_status mfd_dist_atoms(const double* values, const double* weights, size_t n,
                                  mfd_dist** out);
/* CSV with header value,weight. */
MFD_API mfd_status mfd_dist_load_csv(const char* path, mfd_dist** out);
MFD_API double mfd_dist_mean(const mfd_dist* dist);
MFD_API void mfd_dist_destroy(mfd_dist* dist);

/* ---- equilibria ---- */

typedef struct mfd_equilibrium_info {
  mfd_kind kind;
  double u1;
  double u2;
  double mu_bar;
  double cost1;
  double cost2;
  double residual;
  double tolerance;
  int iterations;
  mfd_method method;
  int converged;
} mfd_equilibrium_info;

typedef struct mfd_certificate {
  double firm1_gain;
  double firm2_gain;
  double consumer_gain;
  double firm1_best;
  double firm2_best;
  double consumer_worst_u0;
} mfd_certificate;

/* tol <= 0 selects the library default. The equilibrium keeps copies of
 * params and dist. */
MFD_API mfd_status mfd_solve(mfd_kind kind, const mfd_params* params, const mfd_dist* dist,
                             double tol, mfd_equilibrium** out);
MFD_API mfd_status mfd_equilibrium_info_get(const mfd_equilibrium* eq,
                                            mfd_equilibrium_info* out);
/* Unclipped consumer response at u0 under the equilibrium policy. */
MFD_API mfd_status mfd_equilibrium_policy(const mfd_equilibrium* eq, double u0,
                                          double* unclipped, double* clipped);
/* Unilateral deviation scan: firm_points on [0, firm_max], consumer_points on
 * [0,1] for consumer_samples initial preferences. Zeros select defaults
 * (10000, 10, 1000, 101). */
MFD_API mfd_status mfd_equilibrium_certify(const mfd_equilibrium* eq, int firm_points,
                                           double firm_max, int consumer_points,
                                           int consumer_samples, mfd_certificate* out);
MFD_API void mfd_equilibrium_destroy(mfd_equilibrium* eq);

/* Monotone NE fixed-point gap in the market share at canonical parameters. */
MFD_API mfd_status mfd_ne_gap(double mu, double c, double u0_mean, double* out);

/* ---- sweeps ---- */

typedef struct mfd_sweep_row {
  mfd_kind kind;
  double c;
  double u0_mean;
  double u1;
  double u2;
  double mu_bar;
  double cost1;
  double cost2;
  double residual;
  const char* error; /* NULL on success; owned by the sweep handle */
} mfd_sweep_row;

typedef struct mfd_comparison_row {
  double c;
  double u0_mean;
  double du1;
  double du2;
  double dcost1;
  double dcost2;
  double dmu;
  int leader_flip;
} mfd_comparison_row;

/* Writes up to cap values to out and the full count to *n. out may be NULL
 * to query the count. Syntax: "a,b,c", "lo:hi:n" or "log:lo:hi:n". */
MFD_API mfd_status mfd_parse_values(const char* text, double* out, size_t cap, size_t* n);
MFD_API mfd_status mfd_default_c_grid(double* out, size_t cap, size_t* n);
MFD_API mfd_status mfd_default_u0_grid(double* out, size_t cap, size_t* n);

/* kinds_mask: bit 0 for NE, bit 1 for MLF-NE. tol <= 0 selects the default.
 * Individual solve failures are recorded per row. */
MFD_API mfd_status mfd_sweep_run(const double* c_values, size_t n_c, const double* u0_means,
                                 size_t n_u0, unsigned kinds_mask, double tol,
                                 int include_costs, mfd_sweep** out);
MFD_API mfd_status mfd_sweep_read_csv(const char* path, mfd_sweep** out);
MFD_API mfd_status mfd_sweep_write_csv(const mfd_sweep* sweep, const char* path);
MFD_API size_t mfd_sweep_size(const mfd_sweep* sweep);
MFD_API size_t mfd_sweep_failures(const mfd_sweep* sweep);
MFD_API mfd_status mfd_sweep_row_get(const mfd_sweep* sweep, size_t index, mfd_sweep_row* out);
MFD_API void mfd_sweep_destroy(mfd_sweep* sweep);

MFD_API mfd_status mfd_compare(const mfd_sweep* sweep, mfd_comparison** out);
MFD_API size_t mfd_comparison_size(const mfd_comparison* cmp);
MFD_API mfd_status mfd_comparison_row_get(const mfd_comparison* cmp, size_t index,
                                          mfd_comparison_row* out);
MFD_API mfd_status mfd_comparison_write_csv(const mfd_comparison* cmp, const char* path);
MFD_API void mfd_comparison_destroy(mfd_comparison* cmp);

/* ---- finite-population oracle ---- */

typedef struct mfd_oracle_options {
  double damping; /* <= 0 selects min(0.5, c) */
  int max_sweeps;
  double tol;
  uint64_t seed;
  int firm_points;
  double firm_max;
  int consumer_points;
  int max_outer_rounds; /* MLF-NE firm rounds */
  double search_radius; /* > 0 limits MLF-NE firm moves to a window */
} mfd_oracle_options;

typedef struct mfd_oracle_info {
  size_t n;
  double u1;
  double u2;
  double mean_pref;
  int sweeps;
  int converged;
  double last_change;
  double max_unilateral_gain;
  double consumer_gain;
  double firm1_gain;
  double firm2_gain;
} mfd_oracle_info;

MFD_API mfd_oracle_options mfd_oracle_options_default(void);
/* certify != 0: fails with MFD_ERR_SOLVER when the dynamics do not converge
 * or the unilateral gain exceeds eps. certify == 0 returns the result
 * regardless and eps is ignored. */
MFD_API mfd_status mfd_oracle_run(mfd_kind kind, size_t n, const mfd_params* params,
                                  const mfd_dist* dist, double eps, int certify,
                                  const mfd_oracle_options* opts, mfd_oracle** out);
MFD_API mfd_status mfd_oracle_info_get(const mfd_oracle* oracle, mfd_oracle_info* out);
/* CSV with header u0,u_final. */
MFD_API mfd_status mfd_oracle_write_population(const mfd_oracle* oracle, const char* path);
MFD_API void mfd_oracle_destroy(mfd_oracle* oracle);

#ifdef __cplusplus
}
#endif

#endif
