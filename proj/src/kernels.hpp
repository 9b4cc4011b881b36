#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "common.hpp"

namespace nwidth {

enum class KernelFamily {
  ExponentialType,  // exp(-gamma * ||x-y||^a)
  Matern,           // Matern with smoothness nu in (0,1), length scale l
  ZonalNNGPStep,    // arc-cosine order 0, unit prefactor 1/pi
  ZonalNNGPReLU,    // arc-cosine order 1, unit prefactor 1/pi
  ZonalNTKReLU,     // ReLU NTK closed form, including the "+1" constant
  RandomNNGP1,      // finite-width 1-layer NNGP, seeded weights
  RandomNTK1,       // finite-width 1-layer NTK, seeded weights
};

enum class Activation { Relu, Tanh, Sigmoid, Erf };

struct KernelSpec {
  KernelFamily family = KernelFamily::ExponentialType;
  double gamma = 1.0;       // exponential-type scale
  double exponent_a = 1.0;  // exponential-type exponent, (0,2]
  double nu = 0.5;          // Matern smoothness, (0,1)
  double length_l = 1.0;    // Matern length scale
  std::int64_t width_n1 = 128;
  Activation activation = Activation::Relu;
  std::uint64_t seed = 0;

  void validate() const;
  std::string format() const;
  // Flat key-value text form, e.g. "family=exp gamma=1.0 a=1.0".
  static KernelSpec parse(const std::string& text);
};

const char* family_name(KernelFamily f);
const char* activation_name(Activation a);

class Kernel {
 public:
  explicit Kernel(KernelSpec spec);
  Kernel(const Kernel& other);
  Kernel& operator=(const Kernel& other);

  const KernelSpec& spec() const { return spec_; }
  // Families defined on the sphere only; inputs must have unit norm.
  bool needs_unit_inputs() const;
  bool has_random_features() const;

  // Realized evaluation context for a fixed ambient dimension.  Heavy loops
  // fetch one context up front and use the unchecked entry points; the
  // context holds a reference to the sampled weights, so it stays valid even
  // if the kernel is asked about other dimensions concurrently.
  class Ctx {
   public:
    double eval(const double* x, const double* y) const;
    double diag(const double* x) const;
    double distance(const double* x, const double* y) const;
    std::int64_t dim() const { return dim_; }

   private:
    friend class Kernel;
    const KernelSpec* spec_ = nullptr;
    std::shared_ptr<const PointMatrix> weights_;
    std::int64_t dim_ = 0;
    double matern_front_ = 0.0;  // 2^{1-nu}/Gamma(nu)
  };

  Ctx context(std::int64_t dim) const;

  // Checked scalar entry points.
  double eval(ConstPoint x, ConstPoint y) const;
  double diag(ConstPoint x) const;
  double distance(ConstPoint x, ConstPoint y) const;

  Matrix gram(const PointSet& X, const PointSet& Y) const;
  Matrix gram(const PointSet& X) const;  // symmetric, filled once per pair

  // Throws NotUnitNorm if a zonal family is handed off-sphere points.
  void validate_points(const PointSet& pts) const;
  void validate_point(ConstPoint x) const;

  // Sampled first-layer weights (n1 x dim) for the finite-width families.
  std::shared_ptr<const PointMatrix> weights(std::int64_t dim) const;

 private:
  KernelSpec spec_;
  mutable std::mutex mu_;
  mutable std::vector<std::pair<std::int64_t, std::shared_ptr<const PointMatrix>>>
      weight_cache_;
};

namespace detail {
// Modified Bessel function of the second kind, fractional order nu in (0,1).
double bessel_kv(double nu, double x);
}  // namespace detail

}  // namespace nwidth
