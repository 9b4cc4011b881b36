#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "common.hpp"

namespace nwidth {

// Left endpoints of the surviving middle-thirds intervals at the given depth.
// 2^level points in R^1, sorted ascending.
PointSet generate_cantor(int level);

// Graph {(x_i, W(x_i))} of the truncated Weierstrass series
// W(x) = sum_{n<terms} a^n cos(b^n pi x) on an equispaced grid over [0,1].
PointSet generate_weierstrass(std::int64_t num_points, double a, int b, int terms);

// Lower corners of surviving subcells: 8^level points in R^2.
PointSet generate_sierpinski_carpet(int level);

// Lower corners of surviving subcells: 20^level points in R^3.
PointSet generate_menger(int level);

// RK4 trajectory of the Lorenz system (sigma=10, rho=28, beta=8/3), burn-in
// discarded, each coordinate affinely rescaled to [0,1].
PointSet generate_lorenz(std::int64_t num_points, double dt, std::int64_t burn_in,
                         std::array<double, 3> init);

// Raw integrator state after `steps` RK4 steps (no rescaling); used by the
// convergence checks.
std::array<double, 3> lorenz_integrate(std::array<double, 3> state, double dt,
                                       std::int64_t steps);

// n i.i.d. uniform points on S^{d-1} via normalized Gaussians.
PointSet sample_sphere(std::int64_t n, int d, std::uint64_t seed);

// CSV: one point per line, optional "# dim=<d> label=<s>" header.
PointSet load_points(const std::string& path);
void save_points(const PointSet& pts, const std::string& path);

PointSet subset(const PointSet& pts, std::span<const std::int64_t> indices);

}  // namespace nwidth
