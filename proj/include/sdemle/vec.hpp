#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <vector>

namespace sdemle {

/// Parameter vector for the models in scope (d <= 2). Fixed capacity, no heap.
struct ParamVec {
  std::array<double, 2> a{0.0, 0.0};
  int n = 0;

  ParamVec() = default;
  explicit ParamVec(int dim) : n(dim) { assert(dim >= 0 && dim <= 2); }
  ParamVec(std::initializer_list<double> xs) {
    assert(xs.size() <= 2);
    for (double x : xs) a[n++] = x;
  }
  static ParamVec of(double x) { return ParamVec{x}; }
  static ParamVec of(double x, double y) { return ParamVec{x, y}; }
  static ParamVec from(const std::vector<double>& xs) {
    assert(xs.size() >= 1 && xs.size() <= 2);
    ParamVec v;
    for (double x : xs) v.a[v.n++] = x;
    return v;
  }

  int size() const { return n; }
  double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  std::vector<double> to_vector() const { return {a.begin(), a.begin() + n}; }

  ParamVec& operator+=(const ParamVec& o) {
    for (int i = 0; i < n; ++i) a[i] += o.a[i];
    return *this;
  }
  ParamVec& operator-=(const ParamVec& o) {
    for (int i = 0; i < n; ++i) a[i] -= o.a[i];
    return *this;
  }
  ParamVec& operator*=(double s) {
    for (int i = 0; i < n; ++i) a[i] *= s;
    return *this;
  }
  friend ParamVec operator+(ParamVec x, const ParamVec& y) { return x += y; }
  friend ParamVec operator-(ParamVec x, const ParamVec& y) { return x -= y; }
  friend ParamVec operator*(double s, ParamVec x) { return x *= s; }

  double norm() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += a[i] * a[i];
    return std::sqrt(s);
  }
  bool all_finite() const {
    for (int i = 0; i < n; ++i)
      if (!std::isfinite(a[i])) return false;
    return true;
  }
  friend bool operator==(const ParamVec& x, const ParamVec& y) {
    if (x.n != y.n) return false;
    for (int i = 0; i < x.n; ++i)
      if (x.a[i] != y.a[i]) return false;
    return true;
  }
};

}  // namespace sdemle
