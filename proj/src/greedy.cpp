#include "greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nwidth {

namespace {

// Deterministic parallel argmax with ties broken by lowest index: fixed
// block decomposition, blockwise scan, serial merge.  Independent of the
// thread count and of scheduling.
std::pair<std::int64_t, double> argmax_lowest(const double* v, std::int64_t n) {
  constexpr std::int64_t kBlocks = 64;
  std::int64_t nb = std::min(kBlocks, n);
  std::int64_t chunk = (n + nb - 1) / nb;
  std::vector<std::int64_t> bi(nb, -1);
  std::vector<double> bv(nb, 0.0);
#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (std::int64_t b = 0; b < nb; ++b) {
    std::int64_t lo = b * chunk;
    std::int64_t hi = std::min(n, lo + chunk);
    std::int64_t best = -1;
    double bestv = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = lo; i < hi; ++i) {
      if (v[i] > bestv) {
        bestv = v[i];
        best = i;
      }
    }
    bi[b] = best;
    bv[b] = bestv;
  }
  std::int64_t best = -1;
  double bestv = -std::numeric_limits<double>::infinity();
  for (std::int64_t b = 0; b < nb; ++b) {
    if (bi[b] >= 0 && bv[b] > bestv) {
      bestv = bv[b];
      best = bi[b];
    }
  }
  return {best, bestv};
}

}  // namespace

GreedyRun greedy_widths(const Kernel& kernel, const PointSet& points,
                        std::int64_t budget, double pivot_tol) {
  const std::int64_t n = points.size();
  if (n < 1) fail(ErrorCode::InvalidArgument, "greedy_widths: empty point set");
  if (budget < 1 || budget > n)
    fail(ErrorCode::InvalidArgument, "greedy_widths: budget must be in [1, |points|]");
  kernel.validate_points(points);
  Kernel::Ctx ctx = kernel.context(points.dim());

  std::vector<double> diag(n);
#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (std::int64_t i = 0; i < n; ++i) diag[i] = ctx.diag(points.point(i).data());

  double w0sq = *std::max_element(diag.begin(), diag.end());
  double tol2 = pivot_tol > 0.0 ? pivot_tol * pivot_tol : 1e-12 * w0sq;

  GreedyRun run;
  run.selected.reserve(budget);
  run.widths.reserve(budget);
  // Candidate profiles: row i holds the partial Cholesky column entries
  // c_1(x_i), ..., c_t(x_i), contiguous per candidate.
  std::vector<double> profile(static_cast<std::size_t>(n) * budget);
  std::vector<double> pivot_profile(budget);

  for (std::int64_t t = 0; t < budget; ++t) {
    auto [p, m] = argmax_lowest(diag.data(), n);
    if (m < tol2 || m <= 0.0) {
      run.truncated_at = t;
      break;
    }
    double w = std::sqrt(m);
    run.selected.push_back(p);
    run.widths.push_back(w);
    std::copy_n(profile.data() + static_cast<std::size_t>(p) * budget, t,
                pivot_profile.data());
    const double* xp = points.point(p).data();
    const double* pp = pivot_profile.data();
#pragma omp parallel for schedule(static) num_threads(effective_threads())
    for (std::int64_t i = 0; i < n; ++i) {
      double* li = profile.data() + static_cast<std::size_t>(i) * budget;
      double acc = 0.0;
      for (std::int64_t s = 0; s < t; ++s) acc += li[s] * pp[s];
      double c = (ctx.eval(xp, points.point(i).data()) - acc) / w;
      li[t] = c;
      double d = diag[i] - c * c;
      diag[i] = d > 0.0 ? d : 0.0;
    }
    diag[p] = 0.0;
  }

  const std::int64_t steps = run.steps();
  run.chol = Matrix::Zero(steps, steps);
  for (std::int64_t t = 0; t < steps; ++t) {
    const double* lt = profile.data() + static_cast<std::size_t>(run.selected[t]) * budget;
    for (std::int64_t s = 0; s <= t; ++s) run.chol(t, s) = lt[s];
  }
  run.residual = std::move(diag);
  return run;
}

double residual_at(const GreedyRun& run, const Kernel& kernel,
                   const PointSet& points, std::int64_t t, ConstPoint x) {
  if (t < 0 || t > run.steps())
    fail(ErrorCode::InvalidArgument, "residual_at: step out of range");
  if (static_cast<std::int64_t>(x.size()) != points.dim())
    fail(ErrorCode::DimMismatch, "residual_at: point dimension mismatch");
  kernel.validate_point(x);
  Kernel::Ctx ctx = kernel.context(points.dim());
  double s = ctx.diag(x.data());
  // Forward solve L c = k against the step-t leading block; S = K(x,x)-|c|^2.
  std::vector<double> c(t);
  for (std::int64_t i = 0; i < t; ++i) {
    double v = ctx.eval(points.point(run.selected[i]).data(), x.data());
    for (std::int64_t j = 0; j < i; ++j) v -= run.chol(i, j) * c[j];
    c[i] = v / run.chol(i, i);
    s -= c[i] * c[i];
  }
  return s > 0.0 ? s : 0.0;
}

CoverResult greedy_cover(const Kernel& kernel, const PointSet& points,
                         double epsilon, std::int64_t max_centers) {
  const std::int64_t n = points.size();
  if (n < 1) fail(ErrorCode::InvalidArgument, "greedy_cover: empty point set");
  if (epsilon < 0.0 || (epsilon == 0.0 && max_centers <= 0))
    fail(ErrorCode::InvalidArgument,
         "greedy_cover: epsilon must be positive (or a center cap given)");
  kernel.validate_points(points);
  Kernel::Ctx ctx = kernel.context(points.dim());

  std::int64_t cap = max_centers > 0 ? std::min(max_centers, n) : n;
  CoverResult out;
  out.centers.reserve(cap);
  std::vector<double> mindist(n, std::numeric_limits<double>::infinity());
  std::int64_t next = 0;  // first center: lowest index
  while (true) {
    out.centers.push_back(next);
    const double* xc = points.point(next).data();
#pragma omp parallel for schedule(static) num_threads(effective_threads())
    for (std::int64_t i = 0; i < n; ++i) {
      double d = ctx.distance(xc, points.point(i).data());
      if (d < mindist[i]) mindist[i] = d;
    }
    auto [far, r] = argmax_lowest(mindist.data(), n);
    out.radius_after.push_back(r);
    if (r <= epsilon || static_cast<std::int64_t>(out.centers.size()) >= cap || r <= 0.0)
      break;
    next = far;
  }
  out.radius_achieved = out.radius_after.back();
  return out;
}

double net_radius(const Kernel& kernel, const PointSet& ambient,
                  const PointSet& reference,
                  std::span<const std::int64_t> centers) {
  if (centers.empty()) fail(ErrorCode::InvalidArgument, "net_radius: empty center list");
  if (ambient.dim() != reference.dim())
    fail(ErrorCode::DimMismatch, "net_radius: dimension mismatch");
  for (std::int64_t c : centers)
    if (c < 0 || c >= reference.size())
      fail(ErrorCode::InvalidArgument, "net_radius: center index out of range");
  kernel.validate_points(ambient);
  kernel.validate_points(reference);
  Kernel::Ctx ctx = kernel.context(ambient.dim());
  const std::int64_t n = ambient.size();
  std::vector<double> dist(n);
#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = ambient.point(i).data();
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t c : centers) {
      double d = ctx.distance(xi, reference.point(c).data());
      if (d < best) best = d;
    }
    dist[i] = best;
  }
  return *std::max_element(dist.begin(), dist.end());
}

}  // namespace nwidth
