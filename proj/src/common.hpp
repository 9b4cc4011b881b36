#pragma once

#include <Eigen/Core>
#include <atomic>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nwidth {

// Points are stored one per row, so a single point is contiguous in memory.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ConstPoint = std::span<const double>;

enum class ErrorCode {
  InvalidArgument,
  DimMismatch,
  NotUnitNorm,
  Parse,
  Numeric,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

struct PointSet {
  PointMatrix coords;  // n x dim
  std::string label;

  std::int64_t size() const { return coords.rows(); }
  std::int64_t dim() const { return coords.cols(); }
  ConstPoint point(std::int64_t i) const {
    return {coords.data() + i * coords.cols(),
            static_cast<std::size_t>(coords.cols())};
  }
};

// Thread cap shared by all data-parallel loops; 0 means auto-detect.
namespace detail {
inline std::atomic<int> g_thread_cap{0};
}

inline void set_threads(int threads) {
  detail::g_thread_cap.store(threads < 0 ? 0 : threads);
}

inline int threads() { return detail::g_thread_cap.load(); }

inline int effective_threads() {
  int t = threads();
  if (t > 0) return t;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
#endif
}

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nwidth
