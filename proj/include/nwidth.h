/*
 * nwidth -- empirical Kolmogorov n-widths, kernel-metric covering numbers,
 * spectral lower bounds and constrained-KRR risk curves for point sets under
 * a chosen positive-semidefinite kernel.
 *
 * C API of the shared library.  All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns nw_status
 * and leaves a human-readable message in nw_last_error() (thread-local).
 * Output buffers are caller-allocated; the required sizes are documented per
 * call.  Unless noted otherwise, handles are immutable after creation and
 * safe to share across threads.
 *
 * Kernel specs are flat key-value strings:
 *   family=exp gamma=1.0 a=1.0          exp(-gamma*|x-y|^a), a in (0,2]
 *   family=matern nu=0.5 l=1.0          Matern, nu in (0,1)
 *   family=nngp-step                    zonal arc-cosine order 0 (1/pi scale)
 *   family=nngp-relu                    zonal arc-cosine order 1 (1/pi scale)
 *   family=ntk-relu                     zonal ReLU NTK (includes +1 term)
 *   family=rand-nngp1 width=128 act=relu seed=0    finite-width 1-layer NNGP
 *   family=rand-ntk1  width=128 act=relu seed=0    finite-width 1-layer NTK
 * Zonal families require unit-norm inputs (tolerance 1e-9).  act is one of
 * relu|tanh|sigmoid|erf.
 */

#ifndef NWIDTH_H
#define NWIDTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NWIDTH_API
#elif defined(NWIDTH_BUILD)
#define NWIDTH_API __attribute__((visibility("default")))
#else
#define NWIDTH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nw_status {
  NW_OK = 0,
  NW_ERR_INVALID_ARGUMENT = 1,
  NW_ERR_DIM_MISMATCH = 2,
  NW_ERR_NOT_UNIT_NORM = 3,
  NW_ERR_PARSE = 4,
  NW_ERR_NUMERIC = 5,
  NW_ERR_IO = 6,
  NW_ERR_NULL_POINTER = 7,
} nw_status;

typedef struct nw_kernel nw_kernel;
typedef struct nw_points nw_points;
typedef struct nw_greedy_run nw_greedy_run;
typedef struct nw_cover nw_cover;
typedef struct nw_spectrum nw_spectrum;
typedef struct nw_krr_model nw_krr_model;

NWIDTH_API const char* nw_version(void);
NWIDTH_API const char* nw_status_name(nw_status status);
/* Message for the most recent failing call on this thread ("" if none). */
NWIDTH_API const char* nw_last_error(void);
/* Caps library-internal parallelism; 0 restores auto-detection. */
NWIDTH_API void nw_set_threads(int threads);
NWIDTH_API int nw_get_threads(void);
NWIDTH_API void nw_string_free(char* s);

/* ---- kernels ---------------------------------------------------------- */

NWIDTH_API nw_status nw_kernel_parse(const char* text, nw_kernel** out);
/* Canonical key-value form; fails with NW_ERR_INVALID_ARGUMENT if the
 * buffer is too small. */
NWIDTH_API nw_status nw_kernel_format(const nw_kernel* k, char* buf, size_t bufsize);
NWIDTH_API void nw_kernel_free(nw_kernel* k);
NWIDTH_API nw_status nw_kernel_eval(const nw_kernel* k, const double* x,
                                    const double* y, int64_t dim, double* out);
/* Canonical metric sqrt(K(x,x)+K(y,y)-2K(x,y)), radicand clamped at 0. */
NWIDTH_API nw_status nw_kernel_distance(const nw_kernel* k, const double* x,
                                        const double* y, int64_t dim, double* out);
/* Gram block K[X,Y] into out (|X| x |Y|, row-major).  Y may be NULL for the
 * symmetric K[X,X], computed once per unordered pair. */
NWIDTH_API nw_status nw_kernel_gram(const nw_kernel* k, const nw_points* x,
                                    const nw_points* y, double* out);

/* ---- point sets ------------------------------------------------------- */

NWIDTH_API nw_status nw_points_cantor(int level, nw_points** out);
NWIDTH_API nw_status nw_points_weierstrass(int64_t num_points, double a, int b,
                                           int terms, nw_points** out);
NWIDTH_API nw_status nw_points_carpet(int level, nw_points** out);
NWIDTH_API nw_status nw_points_menger(int level, nw_points** out);
NWIDTH_API nw_status nw_points_lorenz(int64_t num_points, double dt,
                                      int64_t burn_in, const double init[3],
                                      nw_points** out);
NWIDTH_API nw_status nw_points_sphere(int64_t n, int d, uint64_t seed,
                                      nw_points** out);
NWIDTH_API nw_status nw_points_from_array(const double* data, int64_t n,
                                          int64_t dim, const char* label,
                                          nw_points** out);
NWIDTH_API nw_status nw_points_subset(const nw_points* pts, const int64_t* indices,
                                      int64_t count, nw_points** out);
/* CSV round trip: one point per line, comma-separated, optional
 * "# dim=<d> label=<s>" header. */
NWIDTH_API nw_status nw_points_load(const char* path, nw_points** out);
NWIDTH_API nw_status nw_points_save(const nw_points* pts, const char* path);
NWIDTH_API int64_t nw_points_count(const nw_points* pts);
NWIDTH_API int64_t nw_points_dim(const nw_points* pts);
NWIDTH_API const char* nw_points_label(const nw_points* pts);
/* Copies n*dim doubles, row-major. */
NWIDTH_API nw_status nw_points_data(const nw_points* pts, double* out);
NWIDTH_API void nw_points_free(nw_points* pts);

/* ---- greedy width upper bounds ---------------------------------------- */

/* Greedy pivoted-Cholesky upper bounds w_0 >= w_1 >= ... on the Kolmogorov
 * n-widths of the point set.  pivot_tol is on the width scale; <= 0 selects
 * the default 1e-6 * w_0.  The run stops early (truncated) once the largest
 * residual drops below pivot_tol^2. */
NWIDTH_API nw_status nw_greedy_widths(const nw_kernel* k, const nw_points* pts,
                                      int64_t budget, double pivot_tol,
                                      nw_greedy_run** out);
NWIDTH_API int64_t nw_greedy_count(const nw_greedy_run* run);
/* Step at which the pivot fell below tolerance, or -1 if not truncated. */
NWIDTH_API int64_t nw_greedy_truncated_at(const nw_greedy_run* run);
/* nw_greedy_count() entries each. */
NWIDTH_API nw_status nw_greedy_widths_data(const nw_greedy_run* run, double* out);
NWIDTH_API nw_status nw_greedy_selected(const nw_greedy_run* run, int64_t* out);
/* Residual diagonal S_T over all candidates at exit (|points| entries). */
NWIDTH_API nw_status nw_greedy_residual_diag(const nw_greedy_run* run, double* out);
/* Row t of the partial Cholesky factor of the selected-point Gram (t+1
 * entries). */
NWIDTH_API nw_status nw_greedy_chol_row(const nw_greedy_run* run, int64_t t,
                                        double* out);
/* S_t(x): squared RKHS distance from K(x,.) to the span of the first t
 * selected sections, clamped at 0. */
NWIDTH_API nw_status nw_residual_at(const nw_greedy_run* run, const nw_kernel* k,
                                    const nw_points* pts, int64_t t,
                                    const double* x, int64_t dim, double* out);
NWIDTH_API void nw_greedy_free(nw_greedy_run* run);

/* ---- metric covers ----------------------------------------------------- */

/* Farthest-point greedy cover in the canonical metric; stops once the
 * covering radius is <= epsilon or max_centers (> 0) is reached.  epsilon
 * may be 0 when max_centers is given (covering-curve mode). */
NWIDTH_API nw_status nw_greedy_cover(const nw_kernel* k, const nw_points* pts,
                                     double epsilon, int64_t max_centers,
                                     nw_cover** out);
NWIDTH_API int64_t nw_cover_count(const nw_cover* cover);
NWIDTH_API double nw_cover_radius(const nw_cover* cover);
NWIDTH_API nw_status nw_cover_centers(const nw_cover* cover, int64_t* out);
/* Covering radius after n centers, n = 1..count: the empirical eps(n). */
NWIDTH_API nw_status nw_cover_radius_curve(const nw_cover* cover, double* out);
NWIDTH_API void nw_cover_free(nw_cover* cover);
/* Max over `ambient` of the min canonical distance to reference[centers]. */
NWIDTH_API nw_status nw_net_radius(const nw_kernel* k, const nw_points* ambient,
                                   const nw_points* reference,
                                   const int64_t* centers, int64_t count,
                                   double* out);

/* ---- spectra and sandwich bounds --------------------------------------- */

/* Descending eigenvalues of (1/M) K[X,X]; round-off negatives clipped with a
 * count. */
NWIDTH_API nw_status nw_gram_eigenvalues(const nw_kernel* k, const nw_points* pts,
                                         nw_spectrum** out);
NWIDTH_API int64_t nw_spectrum_size(const nw_spectrum* s);
NWIDTH_API int64_t nw_spectrum_negatives_clipped(const nw_spectrum* s);
/* (1/M) sum_i K(x_i, x_i). */
NWIDTH_API double nw_spectrum_trace(const nw_spectrum* s);
NWIDTH_API nw_status nw_spectrum_data(const nw_spectrum* s, double* out);
/* w^L_n = sqrt(sum_{i>n} lambda_i) for n = 0..n_max (n_max+1 entries). */
NWIDTH_API nw_status nw_ismagilov_bounds(const nw_spectrum* s, int64_t n_max,
                                         double* out);
NWIDTH_API void nw_spectrum_free(nw_spectrum* s);

typedef struct nw_sandwich_result {
  double max_violation_eigen; /* max_n n*lambda_{2n} - w_n^2 */
  double max_violation_tail;  /* max_n w^L_n - w_n */
  int64_t checks_eigen;
  int64_t checks_tail;
} nw_sandwich_result;

/* Requires the spectrum and run to come from the same point set. */
NWIDTH_API nw_status nw_sandwich_report(const nw_spectrum* s,
                                        const nw_greedy_run* run,
                                        nw_sandwich_result* out);

/* ---- log-log slope fits and dimension estimates ------------------------ */

typedef enum nw_fit_method {
  NW_FIT_RANSAC = 0,
  NW_FIT_OLS = 1,
} nw_fit_method;

typedef struct nw_fit_params {
  int iterations;            /* RANSAC hypotheses */
  double residual_threshold; /* inlier band in log units */
  uint64_t seed;
} nw_fit_params;

NWIDTH_API nw_fit_params nw_fit_params_default(void);

typedef struct nw_fit_result {
  double slope;
  double intercept;
  int64_t window_lo;
  int64_t window_hi;
  int64_t used;    /* points entering the fit */
  int64_t inliers; /* best consensus size (== used for OLS) */
  int64_t dropped; /* non-positive values excluded before the log transform */
} nw_fit_result;

/* Fits log y = slope * log x + intercept over the inclusive index window
 * (window_lo/hi < 0 selects the full range).  inlier_mask, when non-NULL,
 * receives `used` flags for the RANSAC consensus set. */
NWIDTH_API nw_status nw_fit_loglog(const double* xs, const double* ys,
                                   int64_t count, int64_t window_lo,
                                   int64_t window_hi, nw_fit_method method,
                                   const nw_fit_params* params,
                                   nw_fit_result* out, uint8_t* inlier_mask);

/* d_K^emp: reciprocal slope of (log t, -log w_t).  Window (-1,-1) selects
 * [300, min(500,T-1)] when T >= 500, else the upper half.  Returns +inf in
 * *dim_out when the widths do not decay. */
NWIDTH_API nw_status nw_effective_dimension(const nw_greedy_run* run,
                                            int64_t window_lo, int64_t window_hi,
                                            nw_fit_method method,
                                            const nw_fit_params* params,
                                            double* dim_out, nw_fit_result* fit_out);

/* Same estimate from a raw (t, w_t) curve. */
NWIDTH_API nw_status nw_effective_dimension_curve(const double* ts, const double* ws,
                                                  int64_t count, int64_t window_lo,
                                                  int64_t window_hi,
                                                  nw_fit_method method,
                                                  const nw_fit_params* params,
                                                  double* dim_out,
                                                  nw_fit_result* fit_out);

/* d_rho^emp: slope of (log 1/eps(n), log n) over the covering curve. */
NWIDTH_API nw_status nw_metric_dimension(const double* ns, const double* eps,
                                         int64_t count, int64_t window_lo,
                                         int64_t window_hi, nw_fit_method method,
                                         const nw_fit_params* params,
                                         double* dim_out, nw_fit_result* fit_out);

/* ---- kernel ridge regression ------------------------------------------ */

/* Solves (G + n*lambda*I) alpha = y (minimizer of the (1/n)-averaged
 * empirical squared risk plus lambda * |f|_H^2). */
NWIDTH_API nw_status nw_krr_fit(const nw_kernel* k, const nw_points* x,
                                const double* y, double lambda,
                                nw_krr_model** out);

typedef struct nw_krr_constrained_opts {
  int iterations;   /* bisection halvings on log lambda */
  double norm_tol;  /* informational target band around norm 1 */
  double lambda_min;
  double lambda_max;
} nw_krr_constrained_opts;

NWIDTH_API nw_krr_constrained_opts nw_krr_constrained_defaults(void);

/* Constrained KRR over the unit RKHS ball via bisection on log lambda (the
 * ridge-path norm is nonincreasing in lambda).  opts may be NULL for the
 * defaults (30 iterations, lambda in [1e-12, 1e3], norm_tol 1e-3). */
NWIDTH_API nw_status nw_krr_fit_constrained(const nw_kernel* k, const nw_points* x,
                                            const double* y,
                                            const nw_krr_constrained_opts* opts,
                                            nw_krr_model** out);
NWIDTH_API int64_t nw_krr_size(const nw_krr_model* m);
NWIDTH_API double nw_krr_lambda(const nw_krr_model* m);
NWIDTH_API double nw_krr_rkhs_norm(const nw_krr_model* m);
/* 1 when even the lambda_min endpoint norm is below 1 (no lambda attains
 * norm 1; the returned model is the endpoint fit). */
NWIDTH_API int nw_krr_sub_unit(const nw_krr_model* m);
NWIDTH_API nw_status nw_krr_alpha(const nw_krr_model* m, double* out);
NWIDTH_API nw_status nw_krr_predict(const nw_krr_model* m, const nw_points* xtest,
                                    double* out);
NWIDTH_API void nw_krr_free(nw_krr_model* m);

typedef struct nw_risk_row {
  int64_t n;
  double mean_excess;
  double std_excess;
  int64_t trials; /* successful trials aggregated into this row */
} nw_risk_row;

/* Pure-noise excess-risk decay on S^{d-1}: per trial, Y ~ noise_amp*U[-1,1]
 * independent of X, constrained KRR fit, excess risk estimated as the mean
 * of f(x)^2 over n_test fresh sphere points.  Fills num_sizes rows. */
NWIDTH_API nw_status nw_excess_risk_experiment(const nw_kernel* k, int d,
                                               const int64_t* sizes,
                                               int64_t num_sizes, int64_t trials,
                                               int64_t n_test, double noise_amp,
                                               uint64_t seed, nw_risk_row* out_rows,
                                               int64_t* failed_trials);

/* ---- invariant suite --------------------------------------------------- */

/* Runs the cross-module invariant suite on a named preset.  *report_out
 * (free with nw_string_free) gets one line per check; *failures_out the
 * number of failing checks. */
NWIDTH_API nw_status nw_verify_preset(const char* preset, char** report_out,
                                      int* failures_out);

#ifdef __cplusplus
}
#endif

#endif /* NWIDTH_H */
