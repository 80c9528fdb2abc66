// Fixed-panel composite Simpson rule.
#pragma once

#include <cstddef>

#include "gimprint/core.hpp"
#include "gimprint/summation.hpp"

namespace gimprint {

/// Integral of f over [a, b] with `panels` Simpson panels (2 * panels
/// subintervals). b < a integrates backwards.
template <class F>
double simpson(F&& f, double a, double b, std::size_t panels) {
  require(panels >= 1, "simpson: need at least one panel");
  const std::size_t n = 2 * panels;
  const double h = (b - a) / static_cast<double>(n);
  CompensatedSum acc;
  acc += f(a);
  acc += f(b);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = a + h * static_cast<double>(i);
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(x);
  }
  return acc.value() * h / 3.0;
}

}  // namespace gimprint
