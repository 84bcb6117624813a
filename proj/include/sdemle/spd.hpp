#pragma once

#include <array>

#include "sdemle/vec.hpp"

namespace sdemle {

/// Symmetric matrix for dimension 1 or 2, stored as (a00, a01, a11).
/// Symmetry is structural; the SPD operations (inverse, inverse square root)
/// use the closed-form eigendecomposition.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim) : dim_(dim) {}
  static SymMatrix identity(int dim);

  int dim() const { return dim_; }

  double at(int i, int j) const { return e_[index(i, j)]; }
  void set(int i, int j, double v) { e_[index(i, j)] = v; }
  void add(int i, int j, double v) { e_[index(i, j)] += v; }

  /// Eigenvalues in ascending order (second entry unused for dim 1).
  std::array<double, 2> eigenvalues() const;
  double min_eigenvalue() const { return eigenvalues()[0]; }

  SymMatrix inverse() const;   // throws DegenerateInformation if near-singular
  SymMatrix inv_sqrt() const;  // A^{-1/2} via spectral decomposition
  SymMatrix sqrt_spd() const;  // A^{1/2}

  ParamVec matvec(const ParamVec& x) const;

  friend SymMatrix operator*(const SymMatrix&, const SymMatrix&);  // product of symmetric commuting use
  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  double max_abs() const;

 private:
  int index(int i, int j) const {
    // 1x1 -> 0; 2x2 -> (0,0)=0, (0,1)=(1,0)=1, (1,1)=2
    return (i == 0 && j == 0) ? 0 : ((i == 1 && j == 1) ? 2 : 1);
  }
  /// Apply a scalar function to the spectrum: Q g(L) Q^T.
  SymMatrix spectral_apply(double (*g)(double)) const;

  int dim_ = 0;
  std::array<double, 3> e_{0.0, 0.0, 0.0};
};

}  // namespace sdemle
