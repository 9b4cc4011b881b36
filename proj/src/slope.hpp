#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "greedy.hpp"

namespace nwidth {

enum class FitMethod { Ransac, Ols };

struct RansacParams {
  int iterations = 1000;
  double residual_threshold = 0.05;  // in log units
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  FitMethod method = FitMethod::Ransac;
  std::int64_t window_lo = 0;  // inclusive index range actually used
  std::int64_t window_hi = 0;
  std::vector<std::uint8_t> inlier_mask;  // over usable window points (RANSAC)
  std::int64_t used = 0;                  // points entering the fit
  std::int64_t inliers = 0;               // = used for OLS
  std::int64_t dropped_nonpositive = 0;
  double residual_threshold = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

// Straight-line fit of (log x, log y) over the inclusive index window.
// Non-positive values are dropped (with a count) before the log transform.
// RANSAC: two-point hypotheses, inliers within residual_threshold in log y,
// final OLS refit on the best inlier set; deterministic given seed.
SlopeFit fit_loglog(std::span<const double> xs, std::span<const double> ys,
                    std::int64_t window_lo, std::int64_t window_hi,
                    FitMethod method, const RansacParams& params,
                    std::uint64_t seed);

// d_K^emp: reciprocal slope of (log t, -log w_t) over the window.  A window
// of (-1,-1) selects the default: [300, min(500,T-1)] when T >= 500, else
// the upper half [ceil(T/2), T-1].  Returns +infinity when the widths do
// not decay (slope <= 0 within tolerance).
double effective_dimension(const GreedyRun& run, std::int64_t window_lo,
                           std::int64_t window_hi, FitMethod method,
                           const RansacParams& params, std::uint64_t seed,
                           SlopeFit* fit_out = nullptr);

// Same estimate from a raw (t, w_t) curve, e.g. one read back from a file.
double effective_dimension_curve(std::span<const double> ts,
                                 std::span<const double> ws,
                                 std::int64_t window_lo, std::int64_t window_hi,
                                 FitMethod method, const RansacParams& params,
                                 std::uint64_t seed, SlopeFit* fit_out = nullptr);

// d_rho^emp: slope of (log 1/eps(n), log n) over the window of the covering
// curve (n, eps(n)).
double metric_dimension(std::span<const double> ns, std::span<const double> eps,
                        std::int64_t window_lo, std::int64_t window_hi,
                        FitMethod method, const RansacParams& params,
                        std::uint64_t seed, SlopeFit* fit_out = nullptr);

}  // namespace nwidth
