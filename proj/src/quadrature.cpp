#include "sdemle/quadrature.hpp"

#include <cmath>

#include "sdemle/errors.hpp"

namespace sdemle {

namespace {

double simpson(double fa, double fm, double fb, double width) {
  return width / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  if (depth >= max_depth)
    throw QuadratureFailure("adaptive Simpson did not converge at depth limit");
  return recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(whole));
  if (tol == 0.0) tol = 1e-300;
  return recurse(f, a, b, fa, fm, fb, whole, tol, 0, opts.max_depth);
}

}  // namespace sdemle
