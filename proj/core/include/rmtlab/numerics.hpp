#pragma once

#include <functional>
#include <vector>

#include "rmtlab/quadrature.hpp"
#include "rmtlab/real.hpp"
#include "rmtlab/weight.hpp"

namespace rmtlab {

struct Precision {
  unsigned mantissa_bits = 256;
  Precision() = default;
  explicit Precision(unsigned bits);
  mpfr_prec_t bits() const { return static_cast<mpfr_prec_t>(mantissa_bits); }
  // Target relative accuracy 2^(-mantissa_bits/2) of the integration kernel.
  Real rel_tol() const { return pow2(-static_cast<long>(mantissa_bits / 2), bits()); }
};

using RealFn = std::function<Real(const Real&)>;
using RealFn2 = std::function<Real(const Real&, const Real&)>;

// One integration panel. If sing_side is -1/+1 the corresponding endpoint is
// a weight singularity lambda_{sing_index}; `expo` is the Jacobi exponent
// carried by the integrand at that endpoint.
struct Panel {
  Real a, b;
  int sing_index = -1;
  int sing_side = 0;
  Real expo;
};

struct PanelPlan {
  std::vector<Panel> panels;
  Real tail_cutoff;
};

// Breakpoints: +-R, +-1, the band edges when a tail is present, and every
// singularity; R chosen so the Gaussian tail (times x^max_power) is below
// working precision. Panel exponents are 2*alpha_i*weight_power, matching
// integrands proportional to w^weight_power.
PanelPlan make_panel_plan(const WeightSpec& spec, const Precision& prec, int max_power = 0,
                          const std::vector<Real>& extra_breakpoints = {},
                          double weight_power = 1.0);

// int f(x) w(x) dx over the real line. f must be smooth on each panel and of
// sub-Gaussian growth. Throws on refinement failure.
Real integrate_weighted(const RealFn& f, const WeightSpec& spec, const Precision& prec);

// H(f)(t) = p.v. int f(x) w(x) / (x - t) dx. t may coincide with a
// singularity lambda_i provided alpha_i > -1/2; the pole is handled by
// subtracting the analytic local term. Throws std::domain_error otherwise.
Real pv_hilbert(const RealFn& f, const WeightSpec& spec, const Real& t, const Precision& prec);

// epsilon(f)(x) = 1/2 p.v. int Sign(x-y) f(y) dy for an absolutely
// integrable f whose singular structure is described by `plan`.
Real sign_transform(const RealFn& f, const PanelPlan& plan, const Real& x,
                    const Precision& prec);

// Symmetric-epsilon double principal value over [-1,1]^2:
//   p.v. int int |x|^a |y|^b h(x,y) Sign(x-y) / (xy) dx dy,
// for smooth h supported in [-1,1]^2 and a, b, a+b > -1.
Real pv_double_sign(const RealFn2& h, double a, double b, const Precision& prec);

// Closed-form local term of the one-sided p.v. primitive:
//   p.v. int_{lambda-delta}^{z} |y-lambda|^{p}/(y-lambda) dy
// = (|z-lambda|^p - delta^p)/p   (log(|z-lambda|/delta) at p = 0).
Real pv_local_primitive(const Real& z, const Real& lambda, const Real& delta, const Real& p);

// Frozen node/weight table for integrals of smooth f against w^power:
//   int f(x) w(x)^power dx ~ sum weights[i] * f(nodes[i]).
// Node counts are fixed by an adaptive calibration against x^reserve_degree,
// so the table may be reused for any polynomial f up to that degree.
struct WeightTable {
  std::vector<Real> nodes;
  std::vector<Real> weights;
  Real integrate(const RealFn& f) const;
  std::vector<Real> moments(int kmax) const;
};
WeightTable build_weight_table(const WeightSpec& spec, double power, int reserve_degree,
                               const Precision& prec);

// Machinery for the sign-kernel pairings <J^{-1}f, g> = int g sqrt(w) (F - T/2),
// with F(x) = p.v. int_{-R}^{x} f(y) sqrt(w(y)) dy. Panels adjacent to a
// singularity use tanh-sinh nodes on the outer integral (F is only Hoelder
// there); everything else uses Gauss rules.
class SignKernelIntegrator {
 public:
  // max_degree bounds the polynomial degree of inner and outer factors.
  SignKernelIntegrator(const WeightSpec& spec, const Precision& prec, int max_degree);

  struct InnerFn {
    RealFn numerator;        // f itself when pole_index < 0
    RealFn numerator_deriv;  // needed only when pole_index >= 0
    int pole_index = -1;     // index into spec.sing: f = numerator/(x - lambda_k)
  };

  struct Cumulative {
    std::vector<Real> at_nodes;  // F at each outer node (flattened over panels)
    Real total;                  // F(+R)
  };

  Cumulative cumulative(const InnerFn& f) const;
  // All monomial antiderivatives F_k for f = y^k, k = 0..kmax, in one sweep.
  std::vector<Cumulative> cumulative_monomials(int kmax) const;

  // <J^{-1} f, g> given F = cumulative(f): sum_i W_i g(x_i) (F_i - T/2).
  Real pair(const RealFn& g, const Cumulative& F) const;

  const std::vector<Real>& nodes() const { return nodes_; }
  const std::vector<Real>& weights() const { return weights_; }  // include sqrt(w)

 private:
  struct PanelNodes {
    Panel panel;
    std::size_t first;  // offset into nodes_
    std::size_t count;
  };

  WeightSpec spec_;
  Precision prec_;
  int gl_n_ = 64;
  int sub_n_ = 48;       // sub-segment rule size on smooth panels
  int sub_n_pole_ = 64;  // sub-segment rule size inside singular panels
  std::vector<PanelNodes> panels_;
  std::vector<Real> nodes_;
  std::vector<Real> weights_;
  // Exact distance of each node to its panel's singular endpoint (0 on
  // smooth panels). Tanh-sinh nodes cluster closer to the endpoint than the
  // working precision can represent in x itself.
  std::vector<Real> dist_;
};

}  // namespace rmtlab
