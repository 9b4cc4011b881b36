#include "domains.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "rng.hpp"

namespace nwidth {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

PointSet make(std::int64_t n, std::int64_t dim, std::string label) {
  PointSet p;
  p.coords.resize(n, dim);
  p.label = std::move(label);
  return p;
}

}  // namespace

PointSet generate_cantor(int level) {
  if (level < 1 || level > 26)
    fail(ErrorCode::InvalidArgument, "cantor: level must be in [1,26]");
  std::int64_t n = std::int64_t{1} << level;
  PointSet out = make(n, 1, "cantor-" + std::to_string(level));
  // Ternary digits in {0,2}; counting in binary with the high bit as the
  // first digit yields ascending order.
  std::vector<double> scale(level);
  double s = 1.0;
  for (int k = 0; k < level; ++k) {
    s /= 3.0;
    scale[k] = 2.0 * s;
  }
  for (std::int64_t i = 0; i < n; ++i) {
    double x = 0.0;
    for (int k = 0; k < level; ++k)
      if ((i >> (level - 1 - k)) & 1) x += scale[k];
    out.coords(i, 0) = x;
  }
  return out;
}

PointSet generate_weierstrass(std::int64_t num_points, double a, int b, int terms) {
  if (num_points < 2)
    fail(ErrorCode::InvalidArgument, "weierstrass: need at least 2 points");
  if (!(a > 0.0 && a < 1.0))
    fail(ErrorCode::InvalidArgument, "weierstrass: a must be in (0,1)");
  if (b < 2) fail(ErrorCode::InvalidArgument, "weierstrass: b must be >= 2");
  if (terms < 1) fail(ErrorCode::InvalidArgument, "weierstrass: terms must be positive");
  if (terms > 1 && !(a * b > 1.0))
    fail(ErrorCode::InvalidArgument, "weierstrass: fractal regime requires a*b > 1");
  PointSet out = make(num_points, 2, "weierstrass");
  for (std::int64_t i = 0; i < num_points; ++i) {
    double x = static_cast<double>(i) / static_cast<double>(num_points - 1);
    double w = 0.0;
    double an = 1.0;
    double bn = 1.0;
    for (int k = 0; k < terms; ++k) {
      w += an * std::cos(bn * kPi * x);
      an *= a;
      bn *= b;
    }
    out.coords(i, 0) = x;
    out.coords(i, 1) = w;
  }
  return out;
}

PointSet generate_sierpinski_carpet(int level) {
  if (level < 1 || (level > 8))
    fail(ErrorCode::InvalidArgument, "carpet: level must be in [1,8]");
  // Surviving cells per subdivision: all (i,j) in {0,1,2}^2 except (1,1).
  static constexpr int cx[8] = {0, 0, 0, 1, 1, 2, 2, 2};
  static constexpr int cy[8] = {0, 1, 2, 0, 2, 0, 1, 2};
  std::int64_t n = 1;
  for (int k = 0; k < level; ++k) n *= 8;
  PointSet out = make(n, 2, "carpet-" + std::to_string(level));
  for (std::int64_t i = 0; i < n; ++i) {
    double x = 0.0, y = 0.0, s = 1.0;
    std::int64_t rest = i;
    std::int64_t stride = n / 8;
    for (int k = 0; k < level; ++k) {
      int digit = static_cast<int>(rest / stride);
      rest %= stride;
      stride /= 8;
      s /= 3.0;
      x += cx[digit] * s;
      y += cy[digit] * s;
    }
    out.coords(i, 0) = x;
    out.coords(i, 1) = y;
  }
  return out;
}

PointSet generate_menger(int level) {
  if (level < 1 || level > 5)
    fail(ErrorCode::InvalidArgument, "menger: level must be in [1,5]");
  // Cells with at most one coordinate index equal to 1 survive: 20 of 27.
  int cx[20], cy[20], cz[20];
  int m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if ((i == 1) + (j == 1) + (k == 1) <= 1) {
          cx[m] = i;
          cy[m] = j;
          cz[m] = k;
          ++m;
        }
  std::int64_t n = 1;
  for (int k = 0; k < level; ++k) n *= 20;
  PointSet out = make(n, 3, "menger-" + std::to_string(level));
  for (std::int64_t i = 0; i < n; ++i) {
    double x = 0.0, y = 0.0, z = 0.0, s = 1.0;
    std::int64_t rest = i;
    std::int64_t stride = n / 20;
    for (int k = 0; k < level; ++k) {
      int digit = static_cast<int>(rest / stride);
      rest %= stride;
      stride /= 20;
      s /= 3.0;
      x += cx[digit] * s;
      y += cy[digit] * s;
      z += cz[digit] * s;
    }
    out.coords(i, 0) = x;
    out.coords(i, 1) = y;
    out.coords(i, 2) = z;
  }
  return out;
}

namespace {

std::array<double, 3> lorenz_rhs(const std::array<double, 3>& v) {
  constexpr double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
  return {sigma * (v[1] - v[0]), v[0] * (rho - v[2]) - v[1],
          v[0] * v[1] - beta * v[2]};
}

std::array<double, 3> rk4_step(const std::array<double, 3>& v, double dt) {
  auto add = [](std::array<double, 3> a, const std::array<double, 3>& b, double c) {
    for (int i = 0; i < 3; ++i) a[i] += c * b[i];
    return a;
  };
  auto k1 = lorenz_rhs(v);
  auto k2 = lorenz_rhs(add(v, k1, 0.5 * dt));
  auto k3 = lorenz_rhs(add(v, k2, 0.5 * dt));
  auto k4 = lorenz_rhs(add(v, k3, dt));
  std::array<double, 3> out = v;
  for (int i = 0; i < 3; ++i)
    out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

std::array<double, 3> lorenz_integrate(std::array<double, 3> state, double dt,
                                       std::int64_t steps) {
  for (std::int64_t i = 0; i < steps; ++i) state = rk4_step(state, dt);
  return state;
}

PointSet generate_lorenz(std::int64_t num_points, double dt, std::int64_t burn_in,
                         std::array<double, 3> init) {
  if (num_points < 1) fail(ErrorCode::InvalidArgument, "lorenz: num_points must be positive");
  if (!(dt > 0.0 && dt <= 0.02))
    fail(ErrorCode::InvalidArgument, "lorenz: dt must be in (0, 0.02]");
  if (burn_in < 0) fail(ErrorCode::InvalidArgument, "lorenz: burn_in must be nonnegative");
  std::array<double, 3> v = lorenz_integrate(init, dt, burn_in);
  PointSet out = make(num_points, 3, "lorenz");
  for (std::int64_t i = 0; i < num_points; ++i) {
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(v[c]))
        fail(ErrorCode::Numeric, "lorenz: non-finite state encountered");
      out.coords(i, c) = v[c];
    }
    v = rk4_step(v, dt);
  }
  for (int c = 0; c < 3; ++c) {
    double lo = out.coords.col(c).minCoeff();
    double hi = out.coords.col(c).maxCoeff();
    double span = hi - lo;
    if (span <= 0.0) {
      out.coords.col(c).setZero();
    } else {
      out.coords.col(c) = (out.coords.col(c).array() - lo) / span;
    }
  }
  return out;
}

PointSet sample_sphere(std::int64_t n, int d, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sphere: n must be positive");
  if (d < 2) fail(ErrorCode::InvalidArgument, "sphere: d must be >= 2");
  PointSet out = make(n, d, "sphere-d" + std::to_string(d));
  Rng rng(seed);
  for (std::int64_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int c = 0; c < d; ++c) {
      double g = rng.normal();
      out.coords(i, c) = g;
      norm2 += g * g;
    }
    if (norm2 == 0.0) {  // astronomically unlikely; keep output on the sphere
      out.coords(i, 0) = 1.0;
      norm2 = 1.0;
    }
    out.coords.row(i) /= std::sqrt(norm2);
  }
  return out;
}

PointSet subset(const PointSet& pts, std::span<const std::int64_t> indices) {
  PointSet out = make(static_cast<std::int64_t>(indices.size()), pts.dim(), pts.label);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::int64_t j = indices[i];
    if (j < 0 || j >= pts.size())
      fail(ErrorCode::InvalidArgument, "subset: index out of range");
    out.coords.row(static_cast<std::int64_t>(i)) = pts.coords.row(j);
  }
  return out;
}

// --------------------------------------------------------------------------
// CSV round trip
// --------------------------------------------------------------------------

void save_points(const PointSet& pts, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
  out << "# dim=" << pts.dim() << " label=" << pts.label << "\n";
  char buf[40];
  for (std::int64_t i = 0; i < pts.size(); ++i) {
    for (std::int64_t j = 0; j < pts.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pts.coords(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

PointSet load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open: " + path);
  std::string line;
  std::int64_t declared_dim = -1;
  std::string label;
  std::vector<double> data;
  std::int64_t dim = -1;
  std::int64_t rows = 0;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string tok;
      while (hdr >> tok) {
        if (tok.rfind("dim=", 0) == 0) declared_dim = std::strtoll(tok.c_str() + 4, nullptr, 10);
        else if (tok.rfind("label=", 0) == 0) label = tok.substr(6);
      }
      continue;
    }
    std::int64_t cols = 0;
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      double v = std::strtod(p, &end);
      if (end == p)
        fail(ErrorCode::Parse, path + ": line " + std::to_string(lineno) + ": bad number");
      data.push_back(v);
      ++cols;
      while (*end == ' ' || *end == '\t') ++end;
      if (*end == '\0' || *end == '\r') break;
      if (*end != ',')
        fail(ErrorCode::Parse, path + ": line " + std::to_string(lineno) + ": expected ','");
      p = end + 1;
    }
    if (dim == -1) {
      dim = cols;
    } else if (cols != dim) {
      fail(ErrorCode::Parse, path + ": line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(dim) + " values, got " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) fail(ErrorCode::Parse, path + ": no data rows");
  if (declared_dim > 0 && declared_dim != dim)
    fail(ErrorCode::Parse, path + ": header dim=" + std::to_string(declared_dim) +
                               " does not match row arity " + std::to_string(dim));
  PointSet out = make(rows, dim, label);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < dim; ++j) out.coords(i, j) = data[i * dim + j];
  return out;
}

}  // namespace nwidth
