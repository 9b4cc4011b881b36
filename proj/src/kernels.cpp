#include "kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rng.hpp"

namespace nwidth {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double dot(const double* x, const double* y, std::int64_t d) {
  double s = 0.0;
  for (std::int64_t i = 0; i < d; ++i) s += x[i] * y[i];
  return s;
}

double sqdist(const double* x, const double* y, std::int64_t d) {
  double s = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    double t = x[i] - y[i];
    s += t * t;
  }
  return s;
}

double act_eval(Activation a, double t) {
  switch (a) {
    case Activation::Relu: return t > 0.0 ? t : 0.0;
    case Activation::Tanh: return std::tanh(t);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-t));
    case Activation::Erf: return std::erf(t);
  }
  return 0.0;
}

double act_deriv(Activation a, double t) {
  switch (a) {
    case Activation::Relu: return t > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: {
      double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case Activation::Sigmoid: {
      double s = 1.0 / (1.0 + std::exp(-t));
      return s * (1.0 - s);
    }
    case Activation::Erf:
      return 1.1283791670955125739 * std::exp(-t * t);  // 2/sqrt(pi)
  }
  return 0.0;
}

std::atomic<long> g_radicand_clamps{0};

void note_radicand_clamp() {
  if (g_radicand_clamps.fetch_add(1) == 0 && std::getenv("NWIDTH_DEBUG")) {
    std::fprintf(stderr,
                 "nwidth: canonical-metric radicand clamped to 0 (round-off)\n");
  }
}

// --------------------------------------------------------------------------
// Modified Bessel K_nu, fractional order.  Temme's series for x <= 2 and a
// Thompson-Barnett continued fraction for x > 2; the pair (K_mu, K_{mu+1})
// with |mu| <= 1/2 covers every order in (0,1) without recurrence.
// --------------------------------------------------------------------------

void temme_gammas(double mu, double& gam1, double& gam2, double& gampl,
                  double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  if (std::fabs(mu) > 1e-4) {
    gam1 = (gammi - gampl) / (2.0 * mu);
  } else {
    // Odd part of the 1/Gamma(1+t) series; avoids cancellation near mu = 0.
    const double a1 = 0.57721566490153286061;
    const double a3 = -0.04200263503409523553;
    const double a5 = -0.04219773455554433675;
    double m2 = mu * mu;
    gam1 = -(a1 + m2 * (a3 + m2 * a5));
  }
  gam2 = 0.5 * (gammi + gampl);
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, 0 < x <= 2.
void bessel_k_pair_series(double mu, double x, double& kmu, double& kmu1) {
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;
  double x2 = 0.5 * x;
  double mu2 = mu * mu;
  double pimu = kPi * mu;
  double fact = (std::fabs(pimu) < eps) ? 1.0 : pimu / std::sin(pimu);
  double lx = -std::log(x2);
  double sigma = mu * lx;
  double fact2 = (std::fabs(sigma) < eps) ? 1.0 : std::sinh(sigma) / sigma;
  double gam1, gam2, gampl, gammi;
  temme_gammas(mu, gam1, gam2, gampl, gammi);
  double ff = fact * (gam1 * std::cosh(sigma) + gam2 * fact2 * lx);
  double sum = ff;
  double e = std::exp(sigma);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  double d = x2 * x2;
  double sum1 = p;
  for (int i = 1; i <= max_iter; ++i) {
    ff = (i * ff + p + q) / (i * i - mu2);
    c *= d / i;
    p /= (i - mu);
    q /= (i + mu);
    double del = c * ff;
    sum += del;
    double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::fabs(del) < std::fabs(sum) * eps) break;
  }
  kmu = sum;
  kmu1 = sum1 * (2.0 / x);
}

// Same pair for x > 2 via Steed's continued fraction CF2.
void bessel_k_pair_cf2(double mu, double x, double& kmu, double& kmu1) {
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;
  double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= max_iter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < eps) break;
  }
  h = a1 * h;
  kmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

}  // namespace

namespace detail {

double bessel_kv(double nu, double x) {
  if (!(nu > 0.0 && nu < 1.0)) fail(ErrorCode::InvalidArgument, "bessel_kv: order must be in (0,1)");
  if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "bessel_kv: argument must be positive");
  double mu = (nu <= 0.5) ? nu : nu - 1.0;
  double kmu, kmu1;
  if (x <= 2.0) {
    bessel_k_pair_series(mu, x, kmu, kmu1);
  } else {
    bessel_k_pair_cf2(mu, x, kmu, kmu1);
  }
  return (nu <= 0.5) ? kmu : kmu1;
}

}  // namespace detail

// --------------------------------------------------------------------------
// KernelSpec
// --------------------------------------------------------------------------

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::ExponentialType: return "exp";
    case KernelFamily::Matern: return "matern";
    case KernelFamily::ZonalNNGPStep: return "nngp-step";
    case KernelFamily::ZonalNNGPReLU: return "nngp-relu";
    case KernelFamily::ZonalNTKReLU: return "ntk-relu";
    case KernelFamily::RandomNNGP1: return "rand-nngp1";
    case KernelFamily::RandomNTK1: return "rand-ntk1";
  }
  return "?";
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Erf: return "erf";
  }
  return "?";
}

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::ExponentialType:
      if (!(gamma > 0.0)) fail(ErrorCode::InvalidArgument, "kernel: gamma must be positive");
      if (!(exponent_a > 0.0 && exponent_a <= 2.0))
        fail(ErrorCode::InvalidArgument, "kernel: exponent a must be in (0,2]");
      break;
    case KernelFamily::Matern:
      if (!(nu > 0.0 && nu < 1.0))
        fail(ErrorCode::InvalidArgument, "kernel: nu must be in (0,1)");
      if (!(length_l > 0.0))
        fail(ErrorCode::InvalidArgument, "kernel: length scale l must be positive");
      break;
    case KernelFamily::ZonalNNGPStep:
    case KernelFamily::ZonalNNGPReLU:
    case KernelFamily::ZonalNTKReLU:
      break;
    case KernelFamily::RandomNNGP1:
    case KernelFamily::RandomNTK1:
      if (width_n1 < 1)
        fail(ErrorCode::InvalidArgument, "kernel: width must be a positive integer");
      break;
  }
}

std::string KernelSpec::format() const {
  char buf[64];
  std::ostringstream out;
  out << "family=" << family_name(family);
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, " %s=%.17g", key, v);
    out << buf;
  };
  switch (family) {
    case KernelFamily::ExponentialType:
      num("gamma", gamma);
      num("a", exponent_a);
      break;
    case KernelFamily::Matern:
      num("nu", nu);
      num("l", length_l);
      break;
    case KernelFamily::ZonalNNGPStep:
    case KernelFamily::ZonalNNGPReLU:
    case KernelFamily::ZonalNTKReLU:
      break;
    case KernelFamily::RandomNNGP1:
    case KernelFamily::RandomNTK1:
      out << " width=" << width_n1 << " act=" << activation_name(activation)
          << " seed=" << seed;
      break;
  }
  return out.str();
}

KernelSpec KernelSpec::parse(const std::string& text) {
  KernelSpec spec;
  bool have_family = false;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Parse, "kernel spec: expected key=value, got '" + tok + "'");
    std::string key = tok.substr(0, eq);
    std::string val = tok.substr(eq + 1);
    if (val.empty()) fail(ErrorCode::Parse, "kernel spec: empty value for '" + key + "'");
    auto as_double = [&]() {
      char* end = nullptr;
      double v = std::strtod(val.c_str(), &end);
      if (end == nullptr || *end != '\0')
        fail(ErrorCode::Parse, "kernel spec: bad number '" + val + "' for '" + key + "'");
      return v;
    };
    if (key == "family") {
      have_family = true;
      if (val == "exp") spec.family = KernelFamily::ExponentialType;
      else if (val == "matern") spec.family = KernelFamily::Matern;
      else if (val == "nngp-step") spec.family = KernelFamily::ZonalNNGPStep;
      else if (val == "nngp-relu") spec.family = KernelFamily::ZonalNNGPReLU;
      else if (val == "ntk-relu") spec.family = KernelFamily::ZonalNTKReLU;
      else if (val == "rand-nngp1") spec.family = KernelFamily::RandomNNGP1;
      else if (val == "rand-ntk1") spec.family = KernelFamily::RandomNTK1;
      else fail(ErrorCode::Parse, "kernel spec: unknown family '" + val + "'");
    } else if (key == "gamma") {
      spec.gamma = as_double();
    } else if (key == "a") {
      spec.exponent_a = as_double();
    } else if (key == "nu") {
      spec.nu = as_double();
    } else if (key == "l") {
      spec.length_l = as_double();
    } else if (key == "width") {
      double v = as_double();
      spec.width_n1 = static_cast<std::int64_t>(v);
      if (spec.width_n1 != v)
        fail(ErrorCode::Parse, "kernel spec: width must be an integer");
    } else if (key == "act") {
      if (val == "relu") spec.activation = Activation::Relu;
      else if (val == "tanh") spec.activation = Activation::Tanh;
      else if (val == "sigmoid") spec.activation = Activation::Sigmoid;
      else if (val == "erf") spec.activation = Activation::Erf;
      else fail(ErrorCode::Parse, "kernel spec: unknown activation '" + val + "'");
    } else if (key == "seed") {
      spec.seed = std::strtoull(val.c_str(), nullptr, 10);
    } else {
      fail(ErrorCode::Parse, "kernel spec: unknown key '" + key + "'");
    }
  }
  if (!have_family) fail(ErrorCode::Parse, "kernel spec: missing family=");
  spec.validate();
  return spec;
}

// --------------------------------------------------------------------------
// Kernel
// --------------------------------------------------------------------------

Kernel::Kernel(KernelSpec spec) : spec_(spec) { spec_.validate(); }

Kernel::Kernel(const Kernel& other) : spec_(other.spec_) {
  std::lock_guard<std::mutex> lock(other.mu_);
  weight_cache_ = other.weight_cache_;
}

Kernel& Kernel::operator=(const Kernel& other) {
  if (this == &other) return *this;
  decltype(weight_cache_) cache;
  {
    std::lock_guard<std::mutex> lock(other.mu_);
    cache = other.weight_cache_;
  }
  std::lock_guard<std::mutex> lock(mu_);
  spec_ = other.spec_;
  weight_cache_ = std::move(cache);
  return *this;
}

bool Kernel::needs_unit_inputs() const {
  switch (spec_.family) {
    case KernelFamily::ZonalNNGPStep:
    case KernelFamily::ZonalNNGPReLU:
    case KernelFamily::ZonalNTKReLU:
      return true;
    default:
      return false;
  }
}

bool Kernel::has_random_features() const {
  return spec_.family == KernelFamily::RandomNNGP1 ||
         spec_.family == KernelFamily::RandomNTK1;
}

std::shared_ptr<const PointMatrix> Kernel::weights(std::int64_t dim) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [d, w] : weight_cache_)
    if (d == dim) return w;
  auto w = std::make_shared<PointMatrix>(spec_.width_n1, dim);
  Rng rng(spec_.seed);
  for (std::int64_t i = 0; i < spec_.width_n1; ++i)
    for (std::int64_t j = 0; j < dim; ++j) (*w)(i, j) = rng.normal();
  weight_cache_.emplace_back(dim, w);
  return w;
}

Kernel::Ctx Kernel::context(std::int64_t dim) const {
  if (dim < 1) fail(ErrorCode::InvalidArgument, "kernel: ambient dimension must be positive");
  Ctx ctx;
  ctx.spec_ = &spec_;
  ctx.dim_ = dim;
  if (has_random_features()) ctx.weights_ = weights(dim);
  if (spec_.family == KernelFamily::Matern)
    ctx.matern_front_ = std::pow(2.0, 1.0 - spec_.nu) / std::tgamma(spec_.nu);
  return ctx;
}

double Kernel::Ctx::eval(const double* x, const double* y) const {
  const KernelSpec& s = *spec_;
  switch (s.family) {
    case KernelFamily::ExponentialType: {
      double r2 = sqdist(x, y, dim_);
      if (s.exponent_a == 2.0) return std::exp(-s.gamma * r2);
      double r = std::sqrt(r2);
      if (s.exponent_a == 1.0) return std::exp(-s.gamma * r);
      return r == 0.0 ? 1.0 : std::exp(-s.gamma * std::pow(r, s.exponent_a));
    }
    case KernelFamily::Matern: {
      double r = std::sqrt(sqdist(x, y, dim_));
      if (r == 0.0) return 1.0;  // limit of the closed form
      double z = std::sqrt(2.0 * s.nu) * r / s.length_l;
      return matern_front_ * std::pow(z, s.nu) * detail::bessel_kv(s.nu, z);
    }
    case KernelFamily::ZonalNNGPStep: {
      double u = std::clamp(dot(x, y, dim_), -1.0, 1.0);
      return (kPi - std::acos(u)) / kPi;
    }
    case KernelFamily::ZonalNNGPReLU: {
      double u = std::clamp(dot(x, y, dim_), -1.0, 1.0);
      return (u * (kPi - std::acos(u)) + std::sqrt(std::max(0.0, 1.0 - u * u))) / kPi;
    }
    case KernelFamily::ZonalNTKReLU: {
      double u = std::clamp(dot(x, y, dim_), -1.0, 1.0);
      return ((2.0 * u + 1.0) * (kPi - std::acos(u)) +
              std::sqrt(std::max(0.0, 1.0 - u * u))) / kPi + 1.0;
    }
    case KernelFamily::RandomNNGP1: {
      const PointMatrix& w = *weights_;
      double acc = 0.0;
      for (std::int64_t i = 0; i < w.rows(); ++i) {
        const double* wi = w.data() + i * dim_;
        acc += act_eval(s.activation, dot(wi, x, dim_)) *
               act_eval(s.activation, dot(wi, y, dim_));
      }
      return acc / static_cast<double>(w.rows());
    }
    case KernelFamily::RandomNTK1: {
      // NNGP term (output-layer gradients) plus <x,y> times the mean of
      // sigma'(w x) sigma'(w y) (first-layer gradients).
      const PointMatrix& w = *weights_;
      double nngp = 0.0;
      double deriv = 0.0;
      for (std::int64_t i = 0; i < w.rows(); ++i) {
        const double* wi = w.data() + i * dim_;
        double tx = dot(wi, x, dim_);
        double ty = dot(wi, y, dim_);
        nngp += act_eval(s.activation, tx) * act_eval(s.activation, ty);
        deriv += act_deriv(s.activation, tx) * act_deriv(s.activation, ty);
      }
      double n1 = static_cast<double>(w.rows());
      return nngp / n1 + dot(x, y, dim_) * (deriv / n1);
    }
  }
  return 0.0;
}

double Kernel::Ctx::diag(const double* x) const { return eval(x, x); }

double Kernel::Ctx::distance(const double* x, const double* y) const {
  double r2 = diag(x) + diag(y) - 2.0 * eval(x, y);
  if (r2 < 0.0) {
    note_radicand_clamp();
    r2 = 0.0;
  }
  return std::sqrt(r2);
}

void Kernel::validate_point(ConstPoint x) const {
  if (!needs_unit_inputs()) return;
  double n2 = dot(x.data(), x.data(), static_cast<std::int64_t>(x.size()));
  if (std::fabs(std::sqrt(n2) - 1.0) > 1e-9)
    fail(ErrorCode::NotUnitNorm,
         std::string(family_name(spec_.family)) + " kernel requires unit-norm inputs");
}

void Kernel::validate_points(const PointSet& pts) const {
  if (!needs_unit_inputs()) return;
  for (std::int64_t i = 0; i < pts.size(); ++i) validate_point(pts.point(i));
}

double Kernel::eval(ConstPoint x, ConstPoint y) const {
  if (x.size() != y.size())
    fail(ErrorCode::DimMismatch, "kernel eval: point dimensions differ");
  if (x.empty()) fail(ErrorCode::InvalidArgument, "kernel eval: empty point");
  validate_point(x);
  validate_point(y);
  return context(static_cast<std::int64_t>(x.size())).eval(x.data(), y.data());
}

double Kernel::diag(ConstPoint x) const { return eval(x, x); }

double Kernel::distance(ConstPoint x, ConstPoint y) const {
  if (x.size() != y.size())
    fail(ErrorCode::DimMismatch, "kernel distance: point dimensions differ");
  if (x.empty()) fail(ErrorCode::InvalidArgument, "kernel distance: empty point");
  validate_point(x);
  validate_point(y);
  return context(static_cast<std::int64_t>(x.size())).distance(x.data(), y.data());
}

Matrix Kernel::gram(const PointSet& X, const PointSet& Y) const {
  if (X.dim() != Y.dim())
    fail(ErrorCode::DimMismatch, "gram: point sets have different dimensions");
  validate_points(X);
  validate_points(Y);
  Ctx ctx = context(X.dim());
  Matrix g(X.size(), Y.size());
  const std::int64_t n = X.size(), m = Y.size();
#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = X.point(i).data();
    for (std::int64_t j = 0; j < m; ++j) g(i, j) = ctx.eval(xi, Y.point(j).data());
  }
  return g;
}

Matrix Kernel::gram(const PointSet& X) const {
  validate_points(X);
  Ctx ctx = context(X.dim());
  const std::int64_t n = X.size();
  Matrix g(n, n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(effective_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = X.point(i).data();
    for (std::int64_t j = i; j < n; ++j) g(i, j) = ctx.eval(xi, X.point(j).data());
  }
  for (std::int64_t i = 1; i < n; ++i)
    for (std::int64_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

}  // namespace nwidth
