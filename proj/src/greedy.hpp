#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"
#include "kernels.hpp"

namespace nwidth {

struct GreedyRun {
  std::vector<std::int64_t> selected;  // pivot indices, one per step
  std::vector<double> widths;          // w_0 >= w_1 >= ...
  // Lower-triangular Cholesky factor of the selected-point Gram matrix;
  // row t holds the factor row for step t (t+1 entries).
  Matrix chol;
  std::vector<double> residual;        // S_T(x) over all candidates at exit
  std::optional<std::int64_t> truncated_at;

  std::int64_t steps() const { return static_cast<std::int64_t>(widths.size()); }
};

// Greedy pivoted-Cholesky upper bounds on the Kolmogorov n-widths of a
// finite point set.  Residuals are maintained by rank-one downdates
// S_t(x) = S_{t-1}(x) - c_t(x)^2; ties in the argmax go to the lowest index.
// pivot_tol is on the width scale; a non-positive value selects the default
// 1e-6 * w_0, i.e. the run stops once the Schur pivot drops below
// 1e-12 * w_0^2, where pivots are round-off.
GreedyRun greedy_widths(const Kernel& kernel, const PointSet& points,
                        std::int64_t budget, double pivot_tol = -1.0);

// S_t(x) against the first t selected points of a finished run, clamped at 0.
double residual_at(const GreedyRun& run, const Kernel& kernel,
                   const PointSet& points, std::int64_t t, ConstPoint x);

struct CoverResult {
  std::vector<std::int64_t> centers;
  // Covering radius after n centers (n = 1..centers.size()); doubles as the
  // empirical eps(n) curve for the metric-dimension fit.
  std::vector<double> radius_after;
  double radius_achieved = 0.0;
};

// Farthest-point greedy cover in the canonical metric: add the candidate
// farthest from the current centers until the covering radius is <= epsilon
// (or max_centers is hit, when positive).  |centers| 2-approximates the
// covering number at radius epsilon.
CoverResult greedy_cover(const Kernel& kernel, const PointSet& points,
                         double epsilon, std::int64_t max_centers = -1);

// Max over `ambient` of the min canonical distance to reference[centers].
double net_radius(const Kernel& kernel, const PointSet& ambient,
                  const PointSet& reference,
                  std::span<const std::int64_t> centers);

}  // namespace nwidth
