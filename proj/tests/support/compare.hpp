#pragma once

#include <cmath>

#include "gdf/log_real.hpp"

namespace testsupport {

/// exact <= bound up to floating-point slack on the log scale; mathematically
/// tied cases (e.g. bounds that reduce to the exact value) land on either
/// side by a few ulps.
inline bool dominates(const gdf::LogReal& bound, const gdf::LogReal& exact) {
  if (exact.is_zero()) return true;
  if (bound.is_zero()) return false;
  const double slack = 1e-12 * std::max(1.0, std::abs(bound.log_magnitude()));
  return exact.log_magnitude() <= bound.log_magnitude() + slack;
}

/// Smallest integer >= v, robust against ulp noise on grid-generated reals.
inline std::uint64_t robust_ceil(double v) {
  return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
}

}  // namespace testsupport
