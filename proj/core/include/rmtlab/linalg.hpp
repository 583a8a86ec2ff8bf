#pragma once

#include <vector>

#include "rmtlab/real.hpp"

namespace rmtlab {

// Dense square matrix of Real, row-major.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(int rows, int cols, mpfr_prec_t prec)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Real(0.0, prec)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Real& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Real& operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  Real frobenius_norm() const;
  Real max_abs() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Real> data_;
};

RMatrix matmul(const RMatrix& a, const RMatrix& b);

// Determinant by LU with partial pivoting.
Real determinant(RMatrix a);

// Pfaffian of an even-dimensional antisymmetric matrix by skew-symmetric
// (Parlett-Reid style) elimination with greedy pivoting. Throws on odd
// dimension or if |A + A^T| exceeds asym_tol relative to the largest entry.
Real pfaffian(RMatrix a, const Real& asym_tol);

}  // namespace rmtlab
