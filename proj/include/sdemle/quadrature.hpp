#pragma once

#include <functional>

namespace sdemle {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_depth = 48;
};

/// Adaptive Simpson quadrature with interval bisection and Richardson
/// acceptance. Throws QuadratureFailure if the depth limit is exhausted
/// before the tolerance is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

}  // namespace sdemle
