#pragma once

#include <string>

#include "common.hpp"

namespace nwidth {

struct VerifyResult {
  std::string report;  // one line per check
  int failures = 0;
};

// Cross-module invariant suite (width monotonicity, determinant identity,
// Lipschitz bound, eigenvalue/width sandwich, trace identity) on a named
// preset instance.  Presets: sphere-laplace-small, sphere-gaussian-small,
// sphere-ntk-small, cantor-laplace-small.
VerifyResult verify_preset(const std::string& name);

}  // namespace nwidth
