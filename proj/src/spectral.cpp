#include "spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace nwidth {

Spectrum gram_eigenvalues(const Kernel& kernel, const PointSet& points) {
  const std::int64_t m = points.size();
  if (m < 1) fail(ErrorCode::InvalidArgument, "gram_eigenvalues: empty point set");
  Matrix g = kernel.gram(points);
  if (!g.allFinite()) fail(ErrorCode::Numeric, "gram_eigenvalues: non-finite Gram entries");
  double trace = 0.0;
  for (std::int64_t i = 0; i < m; ++i) trace += g(i, i);
  g /= static_cast<double>(m);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::Numeric, "gram_eigenvalues: eigensolver failed");

  Spectrum s;
  s.source_size = m;
  s.gram_trace = trace / static_cast<double>(m);
  s.eigenvalues.resize(m);
  const auto& ev = solver.eigenvalues();  // ascending
  for (std::int64_t i = 0; i < m; ++i) {
    double v = ev(m - 1 - i);
    s.raw_sum += v;
    if (v < 0.0) {
      ++s.negatives_clipped;
      v = 0.0;
    }
    s.eigenvalues[i] = v;
  }
  return s;
}

std::vector<double> ismagilov_lower_bounds(const Spectrum& spectrum,
                                           std::int64_t n_max) {
  const std::int64_t m = static_cast<std::int64_t>(spectrum.eigenvalues.size());
  if (n_max < 0 || n_max >= m)
    fail(ErrorCode::InvalidArgument, "ismagilov_lower_bounds: n_max must be in [0, M)");
  std::vector<double> out(n_max + 1);
  double tail = 0.0;
  std::vector<double> tails(m + 1, 0.0);
  for (std::int64_t i = m - 1; i >= 0; --i) {
    tail += spectrum.eigenvalues[i];
    tails[i] = tail;
  }
  for (std::int64_t n = 0; n <= n_max; ++n) out[n] = std::sqrt(tails[n]);
  return out;
}

SandwichReport sandwich_report(const Spectrum& spectrum, const GreedyRun& run) {
  const std::int64_t m = static_cast<std::int64_t>(spectrum.eigenvalues.size());
  if (m != static_cast<std::int64_t>(run.residual.size()))
    fail(ErrorCode::InvalidArgument,
         "sandwich_report: spectrum and run use different point sets");
  const std::int64_t steps = run.steps();
  SandwichReport rep;
  if (steps == 0) return rep;

  std::vector<double> wl =
      ismagilov_lower_bounds(spectrum, std::min(steps - 1, m - 1));
  for (std::int64_t n = 0; n < static_cast<std::int64_t>(wl.size()); ++n) {
    rep.max_violation_tail = std::max(rep.max_violation_tail, wl[n] - run.widths[n]);
    ++rep.checks_tail;
  }
  // lambda_{2n} <= w(n)^2 / n with 1-based eigenvalue indexing.
  for (std::int64_t n = 1; n < steps && 2 * n <= m; ++n) {
    double lhs = static_cast<double>(n) * spectrum.eigenvalues[2 * n - 1];
    rep.max_violation_eigen =
        std::max(rep.max_violation_eigen, lhs - run.widths[n] * run.widths[n]);
    ++rep.checks_eigen;
  }
  return rep;
}

}  // namespace nwidth
