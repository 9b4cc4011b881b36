#include "slope.hpp"

#include <cmath>
#include <limits>

#include "rng.hpp"

namespace nwidth {

namespace {

struct OlsLine {
  double slope, intercept;
};

OlsLine ols(const std::vector<double>& xs, const std::vector<double>& ys,
            const std::vector<std::uint8_t>* mask) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    ++n;
  }
  double det = n * sxx - sx * sx;
  if (n < 2 || det <= 0.0)
    fail(ErrorCode::InvalidArgument, "fit: degenerate data (all x equal or < 2 points)");
  double slope = (n * sxy - sx * sy) / det;
  double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

}  // namespace

SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys,
                    std::int64_t window_lo, std::int64_t window_hi,
                    FitMethod method, const RansacParams& params,
                    std::uint64_t seed) {
  if (xs.size() != ys.size())
    fail(ErrorCode::InvalidArgument, "fit_loglog: xs/ys length mismatch");
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
  if (window_lo < 0) window_lo = 0;
  if (window_hi < 0 || window_hi > n - 1) window_hi = n - 1;
  if (window_lo > window_hi)
    fail(ErrorCode::InvalidArgument, "fit_loglog: empty window");

  SlopeFit fit;
  fit.method = method;
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.seed = seed;

  std::vector<double> lx, ly;
  lx.reserve(window_hi - window_lo + 1);
  ly.reserve(window_hi - window_lo + 1);
  for (std::int64_t i = window_lo; i <= window_hi; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      ++fit.dropped_nonpositive;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  fit.used = static_cast<std::int64_t>(lx.size());
  if (fit.used < 2)
    fail(ErrorCode::InvalidArgument, "fit_loglog: fewer than 2 usable points");

  if (method == FitMethod::Ols) {
    auto line = ols(lx, ly, nullptr);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.inliers = fit.used;
    return fit;
  }

  fit.iterations = params.iterations;
  fit.residual_threshold = params.residual_threshold;
  const std::int64_t m = fit.used;
  Rng rng(seed);
  std::vector<std::uint8_t> best_mask;
  std::vector<std::uint8_t> mask(m);
  std::int64_t best_count = -1;
  for (int it = 0; it < params.iterations; ++it) {
    std::int64_t i = static_cast<std::int64_t>(rng.uniform_index(m));
    std::int64_t j = static_cast<std::int64_t>(rng.uniform_index(m));
    if (i == j || lx[i] == lx[j]) continue;
    double slope = (ly[j] - ly[i]) / (lx[j] - lx[i]);
    double intercept = ly[i] - slope * lx[i];
    std::int64_t count = 0;
    for (std::int64_t k = 0; k < m; ++k) {
      bool in = std::fabs(ly[k] - (slope * lx[k] + intercept)) <=
                params.residual_threshold;
      mask[k] = in;
      count += in;
    }
    if (count > best_count) {  // ties keep the earliest hypothesis
      best_count = count;
      best_mask = mask;
    }
  }
  if (best_count < 2)
    fail(ErrorCode::InvalidArgument, "fit_loglog: RANSAC found no 2-point hypothesis");
  auto line = ols(lx, ly, &best_mask);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.inlier_mask = std::move(best_mask);
  fit.inliers = best_count;
  return fit;
}

namespace {

std::pair<std::int64_t, std::int64_t> default_width_window(std::int64_t steps) {
  if (steps >= 500) return {300, std::min<std::int64_t>(500, steps - 1)};
  return {(steps + 1) / 2, steps - 1};
}

}  // namespace

double effective_dimension_curve(std::span<const double> ts,
                                 std::span<const double> ws,
                                 std::int64_t window_lo, std::int64_t window_hi,
                                 FitMethod method, const RansacParams& params,
                                 std::uint64_t seed, SlopeFit* fit_out) {
  const std::int64_t steps = static_cast<std::int64_t>(ts.size());
  if (steps < 2) fail(ErrorCode::InvalidArgument, "effective_dimension: curve too short");
  if (window_lo < 0 && window_hi < 0) {
    auto [lo, hi] = default_width_window(steps);
    window_lo = lo;
    window_hi = hi;
  }
  SlopeFit fit = fit_loglog(ts, ws, window_lo, window_hi, method, params, seed);
  if (fit_out) *fit_out = fit;
  // fit is on (log t, log w); the width decay slope is its negation.
  if (-fit.slope <= 1e-12) return std::numeric_limits<double>::infinity();
  return -1.0 / fit.slope;
}

double effective_dimension(const GreedyRun& run, std::int64_t window_lo,
                           std::int64_t window_hi, FitMethod method,
                           const RansacParams& params, std::uint64_t seed,
                           SlopeFit* fit_out) {
  const std::int64_t steps = run.steps();
  if (steps < 2) fail(ErrorCode::InvalidArgument, "effective_dimension: run too short");
  std::vector<double> ts(steps);
  for (std::int64_t t = 0; t < steps; ++t) ts[t] = static_cast<double>(t);
  return effective_dimension_curve(ts, run.widths, window_lo, window_hi, method,
                                   params, seed, fit_out);
}

double metric_dimension(std::span<const double> ns, std::span<const double> eps,
                        std::int64_t window_lo, std::int64_t window_hi,
                        FitMethod method, const RansacParams& params,
                        std::uint64_t seed, SlopeFit* fit_out) {
  if (ns.size() != eps.size())
    fail(ErrorCode::InvalidArgument, "metric_dimension: length mismatch");
  std::vector<double> inv_eps(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i)
    inv_eps[i] = eps[i] > 0.0 ? 1.0 / eps[i] : 0.0;
  SlopeFit fit = fit_loglog(inv_eps, ns, window_lo, window_hi, method, params, seed);
  if (fit_out) *fit_out = fit;
  return fit.slope;
}

}  // namespace nwidth
