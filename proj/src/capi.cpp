// extern "C" bridge: opaque handles over the core types, exceptions mapped
// to status codes, messages parked in a thread-local slot.

#include "nwidth.h"

#include <cstring>
#include <new>
#include <string>

#include "common.hpp"
#include "domains.hpp"
#include "greedy.hpp"
#include "kernels.hpp"
#include "krr.hpp"
#include "slope.hpp"
#include "spectral.hpp"
#include "verify.hpp"

struct nw_kernel {
  nwidth::Kernel impl;
};
struct nw_points {
  nwidth::PointSet impl;
};
struct nw_greedy_run {
  nwidth::GreedyRun impl;
};
struct nw_cover {
  nwidth::CoverResult impl;
};
struct nw_spectrum {
  nwidth::Spectrum impl;
};
struct nw_krr_model {
  nwidth::KrrModel impl;
};

namespace {

thread_local std::string t_last_error;

nw_status map_code(nwidth::ErrorCode code) {
  using nwidth::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return NW_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimMismatch: return NW_ERR_DIM_MISMATCH;
    case ErrorCode::NotUnitNorm: return NW_ERR_NOT_UNIT_NORM;
    case ErrorCode::Parse: return NW_ERR_PARSE;
    case ErrorCode::Numeric: return NW_ERR_NUMERIC;
    case ErrorCode::Io: return NW_ERR_IO;
  }
  return NW_ERR_INVALID_ARGUMENT;
}

template <typename F>
nw_status wrap(F&& f) noexcept {
  try {
    f();
    t_last_error.clear();
    return NW_OK;
  } catch (const nwidth::Error& e) {
    t_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return NW_ERR_NUMERIC;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return NW_ERR_NUMERIC;
  }
}

nw_status null_arg(const char* what) {
  t_last_error = std::string("null pointer: ") + what;
  return NW_ERR_NULL_POINTER;
}

nwidth::FitMethod to_method(nw_fit_method m) {
  return m == NW_FIT_OLS ? nwidth::FitMethod::Ols : nwidth::FitMethod::Ransac;
}

void fill_fit(const nwidth::SlopeFit& fit, nw_fit_result* out) {
  if (!out) return;
  out->slope = fit.slope;
  out->intercept = fit.intercept;
  out->window_lo = fit.window_lo;
  out->window_hi = fit.window_hi;
  out->used = fit.used;
  out->inliers = fit.inliers;
  out->dropped = fit.dropped_nonpositive;
}

nwidth::RansacParams to_params(const nw_fit_params* p) {
  nwidth::RansacParams out;
  if (p) {
    out.iterations = p->iterations;
    out.residual_threshold = p->residual_threshold;
  }
  return out;
}

std::uint64_t params_seed(const nw_fit_params* p) { return p ? p->seed : 0; }

}  // namespace

extern "C" {

const char* nw_version(void) { return nwidth::kVersion; }

const char* nw_status_name(nw_status status) {
  switch (status) {
    case NW_OK: return "ok";
    case NW_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NW_ERR_DIM_MISMATCH: return "dimension mismatch";
    case NW_ERR_NOT_UNIT_NORM: return "input not unit-norm";
    case NW_ERR_PARSE: return "parse error";
    case NW_ERR_NUMERIC: return "numerical failure";
    case NW_ERR_IO: return "i/o error";
    case NW_ERR_NULL_POINTER: return "null pointer";
  }
  return "unknown";
}

const char* nw_last_error(void) { return t_last_error.c_str(); }

void nw_set_threads(int threads) { nwidth::set_threads(threads); }

int nw_get_threads(void) { return nwidth::threads(); }

void nw_string_free(char* s) { delete[] s; }

/* ---- kernels ---------------------------------------------------------- */

nw_status nw_kernel_parse(const char* text, nw_kernel** out) {
  if (!text || !out) return null_arg("nw_kernel_parse");
  return wrap([&] {
    *out = new nw_kernel{nwidth::Kernel(nwidth::KernelSpec::parse(text))};
  });
}

nw_status nw_kernel_format(const nw_kernel* k, char* buf, size_t bufsize) {
  if (!k || !buf) return null_arg("nw_kernel_format");
  return wrap([&] {
    std::string s = k->impl.spec().format();
    if (s.size() + 1 > bufsize)
      nwidth::fail(nwidth::ErrorCode::InvalidArgument, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

void nw_kernel_free(nw_kernel* k) { delete k; }

nw_status nw_kernel_eval(const nw_kernel* k, const double* x, const double* y,
                         int64_t dim, double* out) {
  if (!k || !x || !y || !out) return null_arg("nw_kernel_eval");
  return wrap([&] {
    *out = k->impl.eval({x, static_cast<size_t>(dim)}, {y, static_cast<size_t>(dim)});
  });
}

nw_status nw_kernel_distance(const nw_kernel* k, const double* x, const double* y,
                             int64_t dim, double* out) {
  if (!k || !x || !y || !out) return null_arg("nw_kernel_distance");
  return wrap([&] {
    *out = k->impl.distance({x, static_cast<size_t>(dim)}, {y, static_cast<size_t>(dim)});
  });
}

nw_status nw_kernel_gram(const nw_kernel* k, const nw_points* x, const nw_points* y,
                         double* out) {
  if (!k || !x || !out) return null_arg("nw_kernel_gram");
  return wrap([&] {
    nwidth::Matrix g = y ? k->impl.gram(x->impl, y->impl) : k->impl.gram(x->impl);
    for (std::int64_t i = 0; i < g.rows(); ++i)
      for (std::int64_t j = 0; j < g.cols(); ++j) out[i * g.cols() + j] = g(i, j);
  });
}

/* ---- point sets ------------------------------------------------------- */

nw_status nw_points_cantor(int level, nw_points** out) {
  if (!out) return null_arg("nw_points_cantor");
  return wrap([&] { *out = new nw_points{nwidth::generate_cantor(level)}; });
}

nw_status nw_points_weierstrass(int64_t num_points, double a, int b, int terms,
                                nw_points** out) {
  if (!out) return null_arg("nw_points_weierstrass");
  return wrap([&] {
    *out = new nw_points{nwidth::generate_weierstrass(num_points, a, b, terms)};
  });
}

nw_status nw_points_carpet(int level, nw_points** out) {
  if (!out) return null_arg("nw_points_carpet");
  return wrap([&] { *out = new nw_points{nwidth::generate_sierpinski_carpet(level)}; });
}

nw_status nw_points_menger(int level, nw_points** out) {
  if (!out) return null_arg("nw_points_menger");
  return wrap([&] { *out = new nw_points{nwidth::generate_menger(level)}; });
}

nw_status nw_points_lorenz(int64_t num_points, double dt, int64_t burn_in,
                           const double init[3], nw_points** out) {
  if (!init || !out) return null_arg("nw_points_lorenz");
  return wrap([&] {
    *out = new nw_points{
        nwidth::generate_lorenz(num_points, dt, burn_in, {init[0], init[1], init[2]})};
  });
}

nw_status nw_points_sphere(int64_t n, int d, uint64_t seed, nw_points** out) {
  if (!out) return null_arg("nw_points_sphere");
  return wrap([&] { *out = new nw_points{nwidth::sample_sphere(n, d, seed)}; });
}

nw_status nw_points_from_array(const double* data, int64_t n, int64_t dim,
                               const char* label, nw_points** out) {
  if (!data || !out) return null_arg("nw_points_from_array");
  return wrap([&] {
    if (n < 1 || dim < 1)
      nwidth::fail(nwidth::ErrorCode::InvalidArgument, "points: n and dim must be positive");
    nwidth::PointSet p;
    p.coords.resize(n, dim);
    std::memcpy(p.coords.data(), data, sizeof(double) * n * dim);
    p.label = label ? label : "";
    *out = new nw_points{std::move(p)};
  });
}

nw_status nw_points_subset(const nw_points* pts, const int64_t* indices,
                           int64_t count, nw_points** out) {
  if (!pts || !indices || !out) return null_arg("nw_points_subset");
  return wrap([&] {
    *out = new nw_points{
        nwidth::subset(pts->impl, {indices, static_cast<size_t>(count)})};
  });
}

nw_status nw_points_load(const char* path, nw_points** out) {
  if (!path || !out) return null_arg("nw_points_load");
  return wrap([&] { *out = new nw_points{nwidth::load_points(path)}; });
}

nw_status nw_points_save(const nw_points* pts, const char* path) {
  if (!pts || !path) return null_arg("nw_points_save");
  return wrap([&] { nwidth::save_points(pts->impl, path); });
}

int64_t nw_points_count(const nw_points* pts) { return pts ? pts->impl.size() : 0; }

int64_t nw_points_dim(const nw_points* pts) { return pts ? pts->impl.dim() : 0; }

const char* nw_points_label(const nw_points* pts) {
  return pts ? pts->impl.label.c_str() : "";
}

nw_status nw_points_data(const nw_points* pts, double* out) {
  if (!pts || !out) return null_arg("nw_points_data");
  std::memcpy(out, pts->impl.coords.data(),
              sizeof(double) * pts->impl.size() * pts->impl.dim());
  return NW_OK;
}

void nw_points_free(nw_points* pts) { delete pts; }

/* ---- greedy width upper bounds ---------------------------------------- */

nw_status nw_greedy_widths(const nw_kernel* k, const nw_points* pts, int64_t budget,
                           double pivot_tol, nw_greedy_run** out) {
  if (!k || !pts || !out) return null_arg("nw_greedy_widths");
  return wrap([&] {
    *out = new nw_greedy_run{nwidth::greedy_widths(k->impl, pts->impl, budget, pivot_tol)};
  });
}

int64_t nw_greedy_count(const nw_greedy_run* run) {
  return run ? run->impl.steps() : 0;
}

int64_t nw_greedy_truncated_at(const nw_greedy_run* run) {
  if (!run || !run->impl.truncated_at) return -1;
  return *run->impl.truncated_at;
}

nw_status nw_greedy_widths_data(const nw_greedy_run* run, double* out) {
  if (!run || !out) return null_arg("nw_greedy_widths_data");
  std::memcpy(out, run->impl.widths.data(), sizeof(double) * run->impl.widths.size());
  return NW_OK;
}

nw_status nw_greedy_selected(const nw_greedy_run* run, int64_t* out) {
  if (!run || !out) return null_arg("nw_greedy_selected");
  std::memcpy(out, run->impl.selected.data(),
              sizeof(int64_t) * run->impl.selected.size());
  return NW_OK;
}

nw_status nw_greedy_residual_diag(const nw_greedy_run* run, double* out) {
  if (!run || !out) return null_arg("nw_greedy_residual_diag");
  std::memcpy(out, run->impl.residual.data(),
              sizeof(double) * run->impl.residual.size());
  return NW_OK;
}

nw_status nw_greedy_chol_row(const nw_greedy_run* run, int64_t t, double* out) {
  if (!run || !out) return null_arg("nw_greedy_chol_row");
  return wrap([&] {
    if (t < 0 || t >= run->impl.steps())
      nwidth::fail(nwidth::ErrorCode::InvalidArgument, "chol_row: step out of range");
    for (int64_t s = 0; s <= t; ++s) out[s] = run->impl.chol(t, s);
  });
}

nw_status nw_residual_at(const nw_greedy_run* run, const nw_kernel* k,
                         const nw_points* pts, int64_t t, const double* x,
                         int64_t dim, double* out) {
  if (!run || !k || !pts || !x || !out) return null_arg("nw_residual_at");
  return wrap([&] {
    *out = nwidth::residual_at(run->impl, k->impl, pts->impl, t,
                               {x, static_cast<size_t>(dim)});
  });
}

void nw_greedy_free(nw_greedy_run* run) { delete run; }

/* ---- metric covers ----------------------------------------------------- */

nw_status nw_greedy_cover(const nw_kernel* k, const nw_points* pts, double epsilon,
                          int64_t max_centers, nw_cover** out) {
  if (!k || !pts || !out) return null_arg("nw_greedy_cover");
  return wrap([&] {
    *out = new nw_cover{nwidth::greedy_cover(k->impl, pts->impl, epsilon, max_centers)};
  });
}

int64_t nw_cover_count(const nw_cover* cover) {
  return cover ? static_cast<int64_t>(cover->impl.centers.size()) : 0;
}

double nw_cover_radius(const nw_cover* cover) {
  return cover ? cover->impl.radius_achieved : 0.0;
}

nw_status nw_cover_centers(const nw_cover* cover, int64_t* out) {
  if (!cover || !out) return null_arg("nw_cover_centers");
  std::memcpy(out, cover->impl.centers.data(),
              sizeof(int64_t) * cover->impl.centers.size());
  return NW_OK;
}

nw_status nw_cover_radius_curve(const nw_cover* cover, double* out) {
  if (!cover || !out) return null_arg("nw_cover_radius_curve");
  std::memcpy(out, cover->impl.radius_after.data(),
              sizeof(double) * cover->impl.radius_after.size());
  return NW_OK;
}

void nw_cover_free(nw_cover* cover) { delete cover; }

nw_status nw_net_radius(const nw_kernel* k, const nw_points* ambient,
                        const nw_points* reference, const int64_t* centers,
                        int64_t count, double* out) {
  if (!k || !ambient || !reference || !centers || !out)
    return null_arg("nw_net_radius");
  return wrap([&] {
    *out = nwidth::net_radius(k->impl, ambient->impl, reference->impl,
                              {centers, static_cast<size_t>(count)});
  });
}

/* ---- spectra and sandwich bounds --------------------------------------- */

nw_status nw_gram_eigenvalues(const nw_kernel* k, const nw_points* pts,
                              nw_spectrum** out) {
  if (!k || !pts || !out) return null_arg("nw_gram_eigenvalues");
  return wrap([&] {
    *out = new nw_spectrum{nwidth::gram_eigenvalues(k->impl, pts->impl)};
  });
}

int64_t nw_spectrum_size(const nw_spectrum* s) {
  return s ? static_cast<int64_t>(s->impl.eigenvalues.size()) : 0;
}

int64_t nw_spectrum_negatives_clipped(const nw_spectrum* s) {
  return s ? s->impl.negatives_clipped : 0;
}

double nw_spectrum_trace(const nw_spectrum* s) { return s ? s->impl.gram_trace : 0.0; }

nw_status nw_spectrum_data(const nw_spectrum* s, double* out) {
  if (!s || !out) return null_arg("nw_spectrum_data");
  std::memcpy(out, s->impl.eigenvalues.data(),
              sizeof(double) * s->impl.eigenvalues.size());
  return NW_OK;
}

nw_status nw_ismagilov_bounds(const nw_spectrum* s, int64_t n_max, double* out) {
  if (!s || !out) return null_arg("nw_ismagilov_bounds");
  return wrap([&] {
    std::vector<double> w = nwidth::ismagilov_lower_bounds(s->impl, n_max);
    std::memcpy(out, w.data(), sizeof(double) * w.size());
  });
}

void nw_spectrum_free(nw_spectrum* s) { delete s; }

nw_status nw_sandwich_report(const nw_spectrum* s, const nw_greedy_run* run,
                             nw_sandwich_result* out) {
  if (!s || !run || !out) return null_arg("nw_sandwich_report");
  return wrap([&] {
    nwidth::SandwichReport rep = nwidth::sandwich_report(s->impl, run->impl);
    out->max_violation_eigen = rep.max_violation_eigen;
    out->max_violation_tail = rep.max_violation_tail;
    out->checks_eigen = rep.checks_eigen;
    out->checks_tail = rep.checks_tail;
  });
}

/* ---- log-log slope fits and dimension estimates ------------------------ */

nw_fit_params nw_fit_params_default(void) { return {1000, 0.05, 0}; }

nw_status nw_fit_loglog(const double* xs, const double* ys, int64_t count,
                        int64_t window_lo, int64_t window_hi, nw_fit_method method,
                        const nw_fit_params* params, nw_fit_result* out,
                        uint8_t* inlier_mask) {
  if (!xs || !ys || !out) return null_arg("nw_fit_loglog");
  return wrap([&] {
    nwidth::SlopeFit fit = nwidth::fit_loglog(
        {xs, static_cast<size_t>(count)}, {ys, static_cast<size_t>(count)},
        window_lo, window_hi, to_method(method), to_params(params),
        params_seed(params));
    fill_fit(fit, out);
    if (inlier_mask && !fit.inlier_mask.empty())
      std::memcpy(inlier_mask, fit.inlier_mask.data(), fit.inlier_mask.size());
  });
}

nw_status nw_effective_dimension(const nw_greedy_run* run, int64_t window_lo,
                                 int64_t window_hi, nw_fit_method method,
                                 const nw_fit_params* params, double* dim_out,
                                 nw_fit_result* fit_out) {
  if (!run || !dim_out) return null_arg("nw_effective_dimension");
  return wrap([&] {
    nwidth::SlopeFit fit;
    *dim_out = nwidth::effective_dimension(run->impl, window_lo, window_hi,
                                           to_method(method), to_params(params),
                                           params_seed(params), &fit);
    fill_fit(fit, fit_out);
  });
}

nw_status nw_effective_dimension_curve(const double* ts, const double* ws,
                                       int64_t count, int64_t window_lo,
                                       int64_t window_hi, nw_fit_method method,
                                       const nw_fit_params* params, double* dim_out,
                                       nw_fit_result* fit_out) {
  if (!ts || !ws || !dim_out) return null_arg("nw_effective_dimension_curve");
  return wrap([&] {
    nwidth::SlopeFit fit;
    *dim_out = nwidth::effective_dimension_curve(
        {ts, static_cast<size_t>(count)}, {ws, static_cast<size_t>(count)},
        window_lo, window_hi, to_method(method), to_params(params),
        params_seed(params), &fit);
    fill_fit(fit, fit_out);
  });
}

nw_status nw_metric_dimension(const double* ns, const double* eps, int64_t count,
                              int64_t window_lo, int64_t window_hi,
                              nw_fit_method method, const nw_fit_params* params,
                              double* dim_out, nw_fit_result* fit_out) {
  if (!ns || !eps || !dim_out) return null_arg("nw_metric_dimension");
  return wrap([&] {
    nwidth::SlopeFit fit;
    *dim_out = nwidth::metric_dimension({ns, static_cast<size_t>(count)},
                                        {eps, static_cast<size_t>(count)}, window_lo,
                                        window_hi, to_method(method),
                                        to_params(params), params_seed(params), &fit);
    fill_fit(fit, fit_out);
  });
}

/* ---- kernel ridge regression ------------------------------------------ */

nw_status nw_krr_fit(const nw_kernel* k, const nw_points* x, const double* y,
                     double lambda, nw_krr_model** out) {
  if (!k || !x || !y || !out) return null_arg("nw_krr_fit");
  return wrap([&] {
    *out = new nw_krr_model{nwidth::fit_krr(
        k->impl, x->impl, {y, static_cast<size_t>(x->impl.size())}, lambda)};
  });
}

nw_krr_constrained_opts nw_krr_constrained_defaults(void) {
  nwidth::ConstrainedOpts d;
  return {d.iterations, d.norm_tol, d.lambda_min, d.lambda_max};
}

nw_status nw_krr_fit_constrained(const nw_kernel* k, const nw_points* x,
                                 const double* y,
                                 const nw_krr_constrained_opts* opts,
                                 nw_krr_model** out) {
  if (!k || !x || !y || !out) return null_arg("nw_krr_fit_constrained");
  return wrap([&] {
    nwidth::ConstrainedOpts copts;
    if (opts) {
      copts.iterations = opts->iterations;
      copts.norm_tol = opts->norm_tol;
      copts.lambda_min = opts->lambda_min;
      copts.lambda_max = opts->lambda_max;
    }
    *out = new nw_krr_model{nwidth::fit_constrained_krr(
        k->impl, x->impl, {y, static_cast<size_t>(x->impl.size())}, copts)};
  });
}

int64_t nw_krr_size(const nw_krr_model* m) {
  return m ? m->impl.train_points.size() : 0;
}

double nw_krr_lambda(const nw_krr_model* m) { return m ? m->impl.lambda : 0.0; }

double nw_krr_rkhs_norm(const nw_krr_model* m) { return m ? m->impl.rkhs_norm : 0.0; }

int nw_krr_sub_unit(const nw_krr_model* m) {
  return m && m->impl.sub_unit_norm ? 1 : 0;
}

nw_status nw_krr_alpha(const nw_krr_model* m, double* out) {
  if (!m || !out) return null_arg("nw_krr_alpha");
  std::memcpy(out, m->impl.alpha.data(), sizeof(double) * m->impl.alpha.size());
  return NW_OK;
}

nw_status nw_krr_predict(const nw_krr_model* m, const nw_points* xtest, double* out) {
  if (!m || !xtest || !out) return null_arg("nw_krr_predict");
  return wrap([&] {
    std::vector<double> f = nwidth::predict(m->impl, xtest->impl);
    std::memcpy(out, f.data(), sizeof(double) * f.size());
  });
}

void nw_krr_free(nw_krr_model* m) { delete m; }

nw_status nw_excess_risk_experiment(const nw_kernel* k, int d, const int64_t* sizes,
                                    int64_t num_sizes, int64_t trials, int64_t n_test,
                                    double noise_amp, uint64_t seed,
                                    nw_risk_row* out_rows, int64_t* failed_trials) {
  if (!k || !sizes || !out_rows) return null_arg("nw_excess_risk_experiment");
  return wrap([&] {
    nwidth::RiskOpts opts;
    opts.trials = trials;
    opts.n_test = n_test;
    opts.noise_amp = noise_amp;
    opts.seed = seed;
    std::vector<nwidth::RiskRow> rows = nwidth::excess_risk_experiment(
        k->impl, d, {sizes, static_cast<size_t>(num_sizes)}, opts, failed_trials);
    for (std::size_t i = 0; i < rows.size(); ++i)
      out_rows[i] = {rows[i].n, rows[i].mean_excess, rows[i].std_excess, rows[i].trials};
  });
}

/* ---- invariant suite --------------------------------------------------- */

nw_status nw_verify_preset(const char* preset, char** report_out, int* failures_out) {
  if (!preset) return null_arg("nw_verify_preset");
  return wrap([&] {
    nwidth::VerifyResult res = nwidth::verify_preset(preset);
    if (report_out) {
      char* s = new char[res.report.size() + 1];
      std::memcpy(s, res.report.c_str(), res.report.size() + 1);
      *report_out = s;
    }
    if (failures_out) *failures_out = res.failures;
  });
}

}  // extern "C"
