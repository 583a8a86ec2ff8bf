#pragma once

#include <vector>

#include "rmtlab/real.hpp"

namespace rmtlab {

// Quadrature rule on the reference interval [-1,1].
struct GaussRule {
  std::vector<Real> x;
  std::vector<Real> w;
};

// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
// Rules are cached per (n, prec); returned references stay valid.
const GaussRule& gauss_legendre(int n, mpfr_prec_t prec);

// n-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b, a,b > -1.
// The weight is part of the rule: sum w_i f(x_i) ~ int f(x)(1-x)^a(1+x)^b dx.
const GaussRule& gauss_jacobi(int n, const Real& a, const Real& b, mpfr_prec_t prec);

// Tanh-sinh (double-exponential) rule on [-1,1]. Handles arbitrary algebraic
// endpoint singularities. Nodes come in symmetric pairs; `dist` holds the
// exactly-computed distance 1-|x| of each node to its nearer endpoint, which
// callers need to evaluate singular factors without cancellation.
struct TanhSinhRule {
  std::vector<Real> x;     // nodes in (-1,1), ascending
  std::vector<Real> w;     // weights (include the step h)
  std::vector<Real> dist;  // 1 - |x|, computed without cancellation
};
const TanhSinhRule& tanh_sinh(mpfr_prec_t prec);

// Recurrence coefficients of the orthonormal polynomials for the Jacobi
// weight (1-x)^a(1+x)^b: p_{k+1} = ((x - alpha_k) p_k - sb_k p_{k-1}) / sb_{k+1},
// with sb_k = sqrt(beta_k) and p_0 = 1/sqrt(beta_0).
struct JacobiRecurrence {
  std::vector<Real> alpha;  // size n
  std::vector<Real> sqrt_beta;  // size n+1; sqrt_beta[0] = sqrt(mu_0)
};
JacobiRecurrence jacobi_recurrence(int n, const Real& a, const Real& b, mpfr_prec_t prec);

}  // namespace rmtlab
