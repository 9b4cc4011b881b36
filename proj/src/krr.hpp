#pragma once

#include <cstdint>
#include <vector>

#include "common.hpp"
#include "kernels.hpp"

namespace nwidth {

struct KrrModel {
  Kernel kernel;
  PointSet train_points;
  Vector alpha;
  double lambda = 0.0;
  double rkhs_norm = 0.0;
  // Set when even the lambda_min endpoint stays inside the unit ball, so no
  // lambda attains norm 1 (interpolation regime / zero targets).
  bool sub_unit_norm = false;
};

// Ridge solve (G + n*lambda*I) alpha = y, i.e. the minimizer of the
// (1/n)-averaged empirical squared risk plus lambda * |f|^2.  Solved by an
// SPD factorization with one jitter retry (+1e-10 on the diagonal).
KrrModel fit_krr(const Kernel& kernel, const PointSet& X,
                 std::span<const double> y, double lambda);

struct ConstrainedOpts {
  int iterations = 30;
  double norm_tol = 1e-3;
  double lambda_min = 1e-12;
  double lambda_max = 1e3;
};

// Constrained KRR over the unit RKHS ball via bisection on log lambda,
// exploiting that the RKHS norm of the ridge path is nonincreasing in
// lambda.  Returns the model whose norm is closest to 1 from below, or the
// lambda_min endpoint flagged sub_unit_norm when that norm is already < 1.
KrrModel fit_constrained_krr(const Kernel& kernel, const PointSet& X,
                             std::span<const double> y,
                             const ConstrainedOpts& opts = {});

// f(x) = sum_i alpha_i K(x_i, x).
std::vector<double> predict(const KrrModel& model, const PointSet& Xtest);

struct RiskRow {
  std::int64_t n = 0;
  double mean_excess = 0.0;
  double std_excess = 0.0;
  std::int64_t trials = 0;
};

struct RiskOpts {
  std::int64_t trials = 10;
  std::int64_t n_test = 2000;
  double noise_amp = 0.2;
  std::uint64_t seed = 0;
  ConstrainedOpts constrained;
};

// Pure-noise excess-risk decay experiment on S^{d-1}: per trial, train on
// (X, Y) with Y ~ noise_amp * U[-1,1] independent of X, fit constrained KRR
// and estimate the excess risk as the mean of f(x)^2 over fresh test points
// (exact reduction since the optimal regression function is 0).
std::vector<RiskRow> excess_risk_experiment(const Kernel& kernel, int d,
                                            std::span<const std::int64_t> sizes,
                                            const RiskOpts& opts,
                                            std::int64_t* failed_trials = nullptr);

}  // namespace nwidth
