#include "verify.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <sstream>

#include "domains.hpp"
#include "greedy.hpp"
#include "kernels.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace nwidth {

namespace {

struct Preset {
  const char* name;
  const char* kernel;
  bool cantor;  // otherwise sphere d=3
};

constexpr Preset kPresets[] = {
    {"sphere-laplace-small", "family=exp gamma=1 a=1", false},
    {"sphere-gaussian-small", "family=exp gamma=1 a=2", false},
    {"sphere-ntk-small", "family=ntk-relu", false},
    {"cantor-laplace-small", "family=exp gamma=1 a=1", true},
};

}  // namespace

VerifyResult verify_preset(const std::string& name) {
  const Preset* preset = nullptr;
  for (const auto& p : kPresets)
    if (name == p.name) preset = &p;
  if (!preset) {
    std::string known;
    for (const auto& p : kPresets) known += std::string(" ") + p.name;
    fail(ErrorCode::InvalidArgument, "unknown preset '" + name + "'; available:" + known);
  }

  Kernel kernel(KernelSpec::parse(preset->kernel));
  PointSet pts = preset->cantor ? generate_cantor(9)  // 512 points
                                : sample_sphere(300, 3, 20240801);
  const std::int64_t budget = 60;
  // Preset kernels have K(x,x) <= 4, so 1e-3 keeps every compared pivot well
  // above accumulated round-off.
  GreedyRun run = greedy_widths(kernel, pts, budget, 1e-3);
  Spectrum spectrum = gram_eigenvalues(kernel, pts);

  std::ostringstream out;
  int failures = 0;
  auto check = [&](const char* what, bool ok, double detail) {
    out << (ok ? "ok   " : "FAIL ") << what << " (" << detail << ")\n";
    if (!ok) ++failures;
  };

  // Width monotonicity.
  double worst_mono = 0.0;
  for (std::int64_t t = 1; t < run.steps(); ++t)
    worst_mono = std::max(worst_mono, run.widths[t] - run.widths[t - 1]);
  check("width monotonicity: w_t <= w_{t-1}", worst_mono <= 0.0, worst_mono);

  // Determinant identity: det(K[X_T,X_T]) = prod w_t^2, in log domain.
  {
    PointSet sel = subset(pts, run.selected);
    Matrix gsel = kernel.gram(sel);
    Eigen::LLT<Matrix> llt(gsel);
    bool ok = llt.info() == Eigen::Success;
    double rel = std::numeric_limits<double>::infinity();
    if (ok) {
      double logdet = 0.0;
      for (std::int64_t i = 0; i < gsel.rows(); ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
      double logprod = 0.0;
      for (double w : run.widths) logprod += 2.0 * std::log(w);
      rel = std::fabs(logdet - logprod);
    }
    check("determinant identity: det = prod w_t^2 (rel 1e-6)", ok && rel <= 1e-6, rel);
  }

  // Lipschitz property of sqrt(S_t) w.r.t. the canonical metric.
  {
    Rng rng(7);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
      std::int64_t i = static_cast<std::int64_t>(rng.uniform_index(pts.size()));
      std::int64_t j = static_cast<std::int64_t>(rng.uniform_index(pts.size()));
      std::int64_t t = static_cast<std::int64_t>(rng.uniform_index(run.steps() + 1));
      double si = std::sqrt(residual_at(run, kernel, pts, t, pts.point(i)));
      double sj = std::sqrt(residual_at(run, kernel, pts, t, pts.point(j)));
      double rho = kernel.distance(pts.point(i), pts.point(j));
      worst = std::max(worst, std::fabs(si - sj) - rho);
    }
    check("Lipschitz: |sqrt S_t(x) - sqrt S_t(y)| <= rho(x,y) + 1e-9", worst <= 1e-9, worst);
  }

  // Eigenvalue/width sandwich.
  {
    SandwichReport rep = sandwich_report(spectrum, run);
    double w0 = run.widths.empty() ? 1.0 : run.widths[0];
    check("sandwich: n lambda_{2n} <= w_n^2 (rel 1e-8)",
          rep.max_violation_eigen <= 1e-8 * w0 * w0, rep.max_violation_eigen);
    check("sandwich: sqrt(tail) <= w_n (rel 1e-8)",
          rep.max_violation_tail <= 1e-8 * w0, rep.max_violation_tail);
  }

  // Trace identity of the normalized Gram spectrum.
  {
    double rel = std::fabs(spectrum.raw_sum - spectrum.gram_trace) /
                 std::max(1e-300, std::fabs(spectrum.gram_trace));
    check("trace identity: sum lambda_i = mean K(x_i,x_i) (rel 1e-8)", rel <= 1e-8, rel);
  }

  VerifyResult result;
  result.report = out.str();
  result.failures = failures;
  return result;
}

}  // namespace nwidth
