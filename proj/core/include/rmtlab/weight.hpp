#pragma once

#include <string>
#include <vector>

#include "rmtlab/real.hpp"

namespace rmtlab {

struct Singularity {
  double lambda = 0.0;
  double alpha = 0.0;
};

// The weight w(x) = e^{-2nx^2} e^{2W(x)} prod_i |x-lambda_i|^{2 alpha_i}.
// W is a polynomial W0 on (-1-eps, 1+eps); with `tail` set it is extended to
// a smooth compactly supported function W0 * bump, zero outside
// (-1-2eps, 1+2eps). Singularities are listed with strictly decreasing
// lambda, all inside (-1,1), and every alpha > -1/2.
struct WeightSpec {
  long n = 1;
  std::vector<double> poly;  // W0 coefficients, ascending degree
  std::vector<Singularity> sing;
  bool tail = false;
  double epsilon = 0.05;

  void validate() const;

  int deg_w0() const;
  // Block dimension d = max(1, deg W0 - 1).
  int block_dim() const { return deg_w0() - 1 > 1 ? deg_w0() - 1 : 1; }
  double total_alpha() const;
  bool is_even() const;
  WeightSpec mirrored() const;  // x -> -x

  Real w0(const Real& x) const;
  Real w0_deriv(const Real& x) const;
  Real potential(const Real& x) const;        // W(x)
  Real potential_deriv(const Real& x) const;  // W'(x)
  Real tail_part(const Real& x) const;        // E = W - W0
  Real log_weight_smooth(const Real& x) const;  // -2n x^2 + 2 W(x)

  // w(x). Throws std::domain_error at a singular lambda_i with alpha_i < 0.
  Real weight(const Real& x) const;
  // w(x)^p.
  Real weight_power(const Real& x, const Real& p) const;
  // w(x)^p with the factor |x-lambda_k|^{2 alpha_k p} removed (smooth near
  // lambda_k); `skip` < 0 removes nothing.
  Real weight_power_reduced(const Real& x, const Real& p, int skip) const;
  // d/dx log(w^{1/2}/|x-l_k|^{a_k}) at x, used for derivative bookkeeping
  // near poles: -2nx + W'(x) + sum_{i != k} alpha_i/(x-lambda_i).
  Real log_sqrtw_reduced_deriv(const Real& x, int skip) const;

  std::string to_json() const;
  static WeightSpec from_json(const std::string& text);
};

// Smooth step: 0 for t<=0, 1 for t>=1, C-infinity, built from exp(-1/t).
Real smooth_step(const Real& t);
// Bump equal to 1 on [-1-eps, 1+eps], 0 outside [-1-2eps, 1+2eps].
Real mollifier(const Real& x, double eps);
Real mollifier_deriv(const Real& x, double eps);

// split_potential: returns W0 coefficient view and the tail callable is
// available via spec.tail_part; kept as a named helper to match reports.
struct PotentialSplit {
  std::vector<double> poly;
  bool has_tail;
};
inline PotentialSplit split_potential(const WeightSpec& spec) {
  return PotentialSplit{spec.poly, spec.tail};
}

}  // namespace rmtlab
