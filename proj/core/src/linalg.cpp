#include "rmtlab/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace rmtlab {

Real RMatrix::frobenius_norm() const {
  if (data_.empty()) return Real(0.0, 64);
  Real acc(0.0, data_[0].prec());
  for (const auto& v : data_) acc += v * v;
  return sqrt(acc);
}

Real RMatrix::max_abs() const {
  if (data_.empty()) return Real(0.0, 64);
  Real m(0.0, data_[0].prec());
  for (const auto& v : data_) m = max(m, abs(v));
  return m;
}

RMatrix matmul(const RMatrix& a, const RMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
  mpfr_prec_t prec = a.rows() > 0 ? a(0, 0).prec() : 64;
  RMatrix c(a.rows(), b.cols(), prec);
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const Real& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

Real determinant(RMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  int n = a.rows();
  if (n == 0) return Real(1.0, 64);
  mpfr_prec_t prec = a(0, 0).prec();
  Real det(1.0, prec);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (abs(a(i, k)) > abs(a(piv, k))) piv = i;
    }
    if (a(piv, k).is_zero()) return Real(0.0, prec);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      Real f = a(i, k) / a(k, k);
      if (f.is_zero()) continue;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

Real pfaffian(RMatrix a, const Real& asym_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("pfaffian: matrix not square");
  int n = a.rows();
  if (n % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  if (n == 0) return Real(1.0, 64);
  mpfr_prec_t prec = a(0, 0).prec();

  Real scale = a.max_abs();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (abs(a(i, j) + a(j, i)) > asym_tol * (scale + 1)) {
        throw std::invalid_argument("pfaffian: matrix not antisymmetric within tolerance");
      }
    }
  }

  Real pf(1.0, prec);
  for (int k = 0; k + 1 < n; k += 2) {
    // greedy pivot: bring the largest |a(k, j)| into position (k, k+1);
    // a simultaneous row+column swap flips the sign
    int piv = k + 1;
    for (int j = k + 2; j < n; ++j) {
      if (abs(a(k, j)) > abs(a(k, piv))) piv = j;
    }
    if (piv != k + 1) {
      for (int j = 0; j < n; ++j) std::swap(a(k + 1, j), a(piv, j));
      for (int i = 0; i < n; ++i) std::swap(a(i, k + 1), a(i, piv));
      pf = -pf;
    }
    const Real& p = a(k, k + 1);
    if (p.is_zero()) return Real(0.0, prec);
    pf *= p;
    // Schur complement with respect to the 2x2 block [[0, p], [-p, 0]]:
    // a_ij += (a(k+1,i) a(k,j) - a(k,i) a(k+1,j)) / p
    for (int i = k + 2; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Real upd = (a(k + 1, i) * a(k, j) - a(k, i) * a(k + 1, j)) / p;
        a(i, j) += upd;
        a(j, i) -= upd;
      }
    }
  }
  return pf;
}

}  // namespace rmtlab
