#include "sdemle/spd.hpp"

#include <cmath>

#include "sdemle/errors.hpp"

namespace sdemle {

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  m.set(0, 0, 1.0);
  if (dim == 2) m.set(1, 1, 1.0);
  return m;
}

std::array<double, 2> SymMatrix::eigenvalues() const {
  if (dim_ == 1) return {e_[0], 0.0};
  const double a = e_[0], b = e_[1], c = e_[2];
  const double mean = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  return {mean - disc, mean + disc};
}

SymMatrix SymMatrix::spectral_apply(double (*g)(double)) const {
  SymMatrix out(dim_);
  if (dim_ == 1) {
    out.e_[0] = g(e_[0]);
    return out;
  }
  const double a = e_[0], b = e_[1], c = e_[2];
  const auto ev = eigenvalues();
  const double g1 = g(ev[0]), g2 = g(ev[1]);
  if (std::abs(b) < 1e-300 * (std::abs(a) + std::abs(c) + 1.0)) {
    out.e_[0] = a <= c ? g1 : g2;
    out.e_[2] = a <= c ? g2 : g1;
    out.e_[1] = 0.0;
    return out;
  }
  // eigenvector for ev[1] (largest): pick the numerically larger form
  double vx, vy;
  if (std::abs(ev[1] - a) > std::abs(ev[1] - c)) {
    vx = b;
    vy = ev[1] - a;
  } else {
    vx = ev[1] - c;
    vy = b;
  }
  const double nrm = std::hypot(vx, vy);
  vx /= nrm;
  vy /= nrm;
  // Q = [[vx, -vy],[vy, vx]] with columns (v, v_perp); A = g2 v v^T + g1 v_perp v_perp^T
  out.e_[0] = g2 * vx * vx + g1 * vy * vy;
  out.e_[1] = g2 * vx * vy - g1 * vx * vy;
  out.e_[2] = g2 * vy * vy + g1 * vx * vx;
  return out;
}

namespace {
double inv_fn(double x) { return 1.0 / x; }
double inv_sqrt_fn(double x) { return 1.0 / std::sqrt(x); }
double sqrt_fn(double x) { return std::sqrt(x); }
}  // namespace

SymMatrix SymMatrix::inverse() const {
  if (min_eigenvalue() < 1e-10)
    throw DegenerateInformation("information matrix is numerically singular (min eigenvalue " +
                                std::to_string(min_eigenvalue()) + ")");
  return spectral_apply(inv_fn);
}

SymMatrix SymMatrix::inv_sqrt() const {
  if (min_eigenvalue() < 1e-10)
    throw DegenerateInformation("information matrix is numerically singular (min eigenvalue " +
                                std::to_string(min_eigenvalue()) + ")");
  return spectral_apply(inv_sqrt_fn);
}

SymMatrix SymMatrix::sqrt_spd() const {
  if (min_eigenvalue() < 0.0)
    throw DegenerateInformation("matrix square root requires a nonnegative spectrum");
  return spectral_apply(sqrt_fn);
}

ParamVec SymMatrix::matvec(const ParamVec& x) const {
  ParamVec y(dim_);
  if (dim_ == 1) {
    y[0] = e_[0] * x[0];
  } else {
    y[0] = e_[0] * x[0] + e_[1] * x[1];
    y[1] = e_[1] * x[0] + e_[2] * x[1];
  }
  return y;
}

SymMatrix operator*(const SymMatrix& x, const SymMatrix& y) {
  SymMatrix out(x.dim_);
  if (x.dim_ == 1) {
    out.e_[0] = x.e_[0] * y.e_[0];
    return out;
  }
  // general product of two symmetric matrices need not be symmetric; callers
  // only use commuting pairs (a matrix with its own spectral functions), for
  // which the product is symmetric. Assemble and symmetrize the off-diagonal.
  const double p00 = x.e_[0] * y.e_[0] + x.e_[1] * y.e_[1];
  const double p01 = x.e_[0] * y.e_[1] + x.e_[1] * y.e_[2];
  const double p10 = x.e_[1] * y.e_[0] + x.e_[2] * y.e_[1];
  const double p11 = x.e_[1] * y.e_[1] + x.e_[2] * y.e_[2];
  out.e_[0] = p00;
  out.e_[1] = 0.5 * (p01 + p10);
  out.e_[2] = p11;
  return out;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  for (int i = 0; i < 3; ++i) e_[i] += o.e_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (double& v : e_) v *= s;
  return *this;
}

double SymMatrix::max_abs() const {
  double m = 0;
  for (double v : e_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace sdemle
