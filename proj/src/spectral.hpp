#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "common.hpp"
#include "greedy.hpp"
#include "kernels.hpp"

namespace nwidth {

struct Spectrum {
  std::vector<double> eigenvalues;  // descending, clipped at 0
  std::int64_t source_size = 0;     // M
  std::int64_t negatives_clipped = 0;
  double raw_sum = 0.0;             // sum of eigenvalues before clipping
  double gram_trace = 0.0;          // (1/M) sum K(x_i,x_i)
};

// Full symmetric eigendecomposition of the normalized Gram matrix
// (1/M)[K(x_i,x_j)].  Round-off negatives are clipped after the trace is
// recorded, with a count.
Spectrum gram_eigenvalues(const Kernel& kernel, const PointSet& points);

// w^L_n = sqrt(sum_{i>n} lambda_i) for n = 0..n_max, by reverse cumulative
// sum (1-based eigenvalue indexing, so n counts leading eigenvalues removed).
std::vector<double> ismagilov_lower_bounds(const Spectrum& spectrum,
                                           std::int64_t n_max);

struct SandwichReport {
  // max over n of n*lambda_{2n} - w_n^2 (eigenvalue decay vs squared widths)
  double max_violation_eigen = -std::numeric_limits<double>::infinity();
  // max over n of w^L_n - w_n (tail lower bound vs greedy upper bound)
  double max_violation_tail = -std::numeric_limits<double>::infinity();
  std::int64_t checks_eigen = 0;
  std::int64_t checks_tail = 0;
};

// Checks the eigenvalue/width sandwich for a spectrum and a greedy run
// computed on the same point set under the uniform empirical measure.
SandwichReport sandwich_report(const Spectrum& spectrum, const GreedyRun& run);

}  // namespace nwidth
