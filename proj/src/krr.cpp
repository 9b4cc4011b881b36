#include "krr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "domains.hpp"
#include "rng.hpp"

namespace nwidth {

namespace {

void check_xy(const PointSet& X, std::span<const double> y) {
  if (X.size() < 1) fail(ErrorCode::InvalidArgument, "krr: empty training set");
  if (static_cast<std::int64_t>(y.size()) != X.size())
    fail(ErrorCode::InvalidArgument, "krr: |y| must equal |X|");
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(b);
    if (x.allFinite()) return x;
  }
  // One jitter retry; Gram matrices are numerically singular for tiny lambda.
  Matrix aj = a;
  aj.diagonal().array() += 1e-10;
  Eigen::LLT<Matrix> llt2(aj);
  if (llt2.info() != Eigen::Success)
    fail(ErrorCode::Numeric, "krr: SPD factorization failed");
  Vector x = llt2.solve(b);
  if (!x.allFinite()) fail(ErrorCode::Numeric, "krr: solver produced non-finite values");
  return x;
}

double norm_from_alpha(const Matrix& g, const Vector& alpha) {
  double q = alpha.dot(g * alpha);
  return q > 0.0 ? std::sqrt(q) : 0.0;
}

// Symmetric tridiagonal solve of (T + shift I) u = z; T is SPD up to
// round-off, so no pivoting.
void tridiag_solve(const Vector& diag, const Vector& sub, double shift,
                   const Vector& z, Vector& u, Vector& scratch) {
  const std::int64_t n = diag.size();
  u = z;
  scratch.resize(n);
  double piv = diag(0) + shift;
  if (piv <= 0.0) piv = shift > 0.0 ? shift : 1e-300;
  scratch(0) = piv;
  for (std::int64_t i = 1; i < n; ++i) {
    double l = sub(i - 1) / scratch(i - 1);
    double d = diag(i) + shift - l * sub(i - 1);
    if (d <= 0.0) d = shift > 0.0 ? shift : 1e-300;
    scratch(i) = d;
    u(i) -= l * u(i - 1);
  }
  u(n - 1) /= scratch(n - 1);
  for (std::int64_t i = n - 2; i >= 0; --i)
    u(i) = (u(i) - sub(i) * u(i + 1)) / scratch(i);
}

double tridiag_quadratic(const Vector& diag, const Vector& sub, const Vector& u) {
  const std::int64_t n = diag.size();
  double q = diag(0) * u(0) * u(0);
  for (std::int64_t i = 1; i < n; ++i) {
    q += diag(i) * u(i) * u(i) + 2.0 * sub(i - 1) * u(i) * u(i - 1);
  }
  return q;
}

}  // namespace

KrrModel fit_krr(const Kernel& kernel, const PointSet& X,
                 std::span<const double> y, double lambda) {
  check_xy(X, y);
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "fit_krr: lambda must be positive");
  const std::int64_t n = X.size();
  Matrix g = kernel.gram(X);
  Matrix a = g;
  a.diagonal().array() += static_cast<double>(n) * lambda;
  Vector b = Eigen::Map<const Vector>(y.data(), n);
  KrrModel model{kernel, X, solve_spd(a, b), lambda, 0.0, false};
  model.rkhs_norm = norm_from_alpha(g, model.alpha);
  return model;
}

KrrModel fit_constrained_krr(const Kernel& kernel, const PointSet& X,
                             std::span<const double> y,
                             const ConstrainedOpts& opts) {
  check_xy(X, y);
  if (!(opts.lambda_min > 0.0 && opts.lambda_max > opts.lambda_min))
    fail(ErrorCode::InvalidArgument, "fit_constrained_krr: bad lambda range");
  if (opts.iterations < 1)
    fail(ErrorCode::InvalidArgument, "fit_constrained_krr: iterations must be positive");
  const std::int64_t n = X.size();
  const double dn = static_cast<double>(n);
  Matrix g = kernel.gram(X);
  if (!g.allFinite()) fail(ErrorCode::Numeric, "fit_constrained_krr: non-finite Gram");
  Vector b = Eigen::Map<const Vector>(y.data(), n);

  // One tridiagonalization G = Q T Q^T makes each bisection step O(n): with
  // z = Q^T y and u = (T + n*lambda)^{-1} z, the path norm is
  // |f_lambda|^2 = u^T T u.
  Eigen::Tridiagonalization<Matrix> tri(g);
  Vector tdiag = tri.diagonal();
  Vector tsub = tri.subDiagonal();
  Vector z = tri.matrixQ().adjoint() * b;
  Vector u(n), scratch(n);

  auto norm_at = [&](double lambda) {
    tridiag_solve(tdiag, tsub, dn * lambda, z, u, scratch);
    double q = tridiag_quadratic(tdiag, tsub, u);
    return q > 0.0 ? std::sqrt(q) : 0.0;
  };

  auto finish = [&](double lambda, bool sub_unit) {
    tridiag_solve(tdiag, tsub, dn * lambda, z, u, scratch);
    Vector alpha = tri.matrixQ() * u;
    if (!alpha.allFinite())
      fail(ErrorCode::Numeric, "fit_constrained_krr: non-finite solution");
    KrrModel model{kernel, X, std::move(alpha), lambda, 0.0, sub_unit};
    model.rkhs_norm = norm_from_alpha(g, model.alpha);
    return model;
  };

  if (norm_at(opts.lambda_min) < 1.0) return finish(opts.lambda_min, true);

  double llo = std::log(opts.lambda_min);  // norm >= 1 side
  double lhi = std::log(opts.lambda_max);  // norm <= 1 side (expected)
  if (norm_at(opts.lambda_max) >= 1.0) return finish(opts.lambda_max, false);
  for (int i = 0; i < opts.iterations; ++i) {
    double mid = 0.5 * (llo + lhi);
    if (norm_at(std::exp(mid)) >= 1.0) llo = mid;
    else lhi = mid;
  }
  return finish(std::exp(lhi), false);
}

std::vector<double> predict(const KrrModel& model, const PointSet& Xtest) {
  if (Xtest.dim() != model.train_points.dim())
    fail(ErrorCode::DimMismatch, "predict: dimension mismatch");
  model.kernel.validate_points(Xtest);
  Kernel::Ctx ctx = model.kernel.context(Xtest.dim());
  const std::int64_t m = Xtest.size();
  const std::int64_t n = model.train_points.size();
  std::vector<double> out(m);
#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (std::int64_t i = 0; i < m; ++i) {
    const double* xi = Xtest.point(i).data();
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j)
      acc += model.alpha(j) * ctx.eval(model.train_points.point(j).data(), xi);
    out[i] = acc;
  }
  return out;
}

std::vector<RiskRow> excess_risk_experiment(const Kernel& kernel, int d,
                                            std::span<const std::int64_t> sizes,
                                            const RiskOpts& opts,
                                            std::int64_t* failed_trials) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "excess_risk_experiment: d must be >= 2");
  if (opts.trials < 1 || opts.n_test < 1)
    fail(ErrorCode::InvalidArgument, "excess_risk_experiment: trials and n_test must be positive");
  if (opts.noise_amp < 0.0)
    fail(ErrorCode::InvalidArgument, "excess_risk_experiment: noise_amp must be nonnegative");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    if (sizes[i + 1] <= sizes[i])
      fail(ErrorCode::InvalidArgument, "excess_risk_experiment: sizes must be increasing");

  const std::int64_t ns = static_cast<std::int64_t>(sizes.size());
  const std::int64_t total = ns * opts.trials;
  std::vector<double> excess(total, std::numeric_limits<double>::quiet_NaN());
  std::int64_t failures = 0;

  // Trials are independent; seeds are derived from (size index, trial) so the
  // result does not depend on scheduling.
#pragma omp parallel for schedule(dynamic, 1) num_threads(effective_threads()) reduction(+ : failures)
  for (std::int64_t job = 0; job < total; ++job) {
    std::int64_t si = job / opts.trials;
    std::int64_t trial = job % opts.trials;
    std::int64_t n = sizes[si];
    std::uint64_t s_train = derive_seed(opts.seed, 3 * job + 1);
    std::uint64_t s_noise = derive_seed(opts.seed, 3 * job + 2);
    std::uint64_t s_test = derive_seed(opts.seed, 3 * job + 3);
    (void)trial;
    try {
      PointSet x = sample_sphere(n, d, s_train);
      Rng noise(s_noise);
      std::vector<double> y(n);
      for (auto& v : y) v = opts.noise_amp * (2.0 * noise.uniform() - 1.0);
      KrrModel model = fit_constrained_krr(kernel, x, y, opts.constrained);
      PointSet xt = sample_sphere(opts.n_test, d, s_test);
      std::vector<double> f = predict(model, xt);
      double acc = 0.0, comp = 0.0;  // Neumaier sum of f^2
      for (double v : f) {
        double term = v * v;
        double t = acc + term;
        comp += std::fabs(acc) >= std::fabs(term) ? (acc - t) + term : (term - t) + acc;
        acc = t;
      }
      excess[job] = (acc + comp) / static_cast<double>(opts.n_test);
    } catch (const Error&) {
      failures += 1;
    }
  }

  std::vector<RiskRow> rows(ns);
  for (std::int64_t si = 0; si < ns; ++si) {
    RiskRow row;
    row.n = sizes[si];
    double sum = 0.0;
    std::int64_t k = 0;
    for (std::int64_t t = 0; t < opts.trials; ++t) {
      double v = excess[si * opts.trials + t];
      if (std::isfinite(v)) {
        sum += v;
        ++k;
      }
    }
    row.trials = k;
    if (k > 0) row.mean_excess = sum / k;
    if (k > 1) {
      double ss = 0.0;
      for (std::int64_t t = 0; t < opts.trials; ++t) {
        double v = excess[si * opts.trials + t];
        if (std::isfinite(v)) ss += (v - row.mean_excess) * (v - row.mean_excess);
      }
      row.std_excess = std::sqrt(ss / (k - 1));
    }
    rows[si] = row;
  }
  if (failed_trials) *failed_trials = failures;
  return rows;
}

}  // namespace nwidth
