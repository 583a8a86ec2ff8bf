#include "rmtlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtlab {

Precision::Precision(unsigned bits) : mantissa_bits(bits) {
  if (bits < 64) throw std::invalid_argument("Precision: mantissa_bits must be >= 64");
}

namespace {

// int_a^b u(x) |x-s|^p dx where s is the endpoint selected by `side`
// (-1: s=a, +1: s=b, 0: no singular factor). Gauss-Jacobi rules carry the
// |x-s|^p factor; u must be smooth on [a,b].
Real panel_integral(const RealFn& u, const Real& a, const Real& b, int side, const Real& p,
                    int n, mpfr_prec_t prec) {
  Real half = (b - a) / 2;
  const GaussRule* rule;
  Real zero(0.0, prec);
  if (side == 0) {
    rule = &gauss_legendre(n, prec);
  } else if (side < 0) {
    rule = &gauss_jacobi(n, zero, p, prec);
  } else {
    rule = &gauss_jacobi(n, p, zero, prec);
  }
  Real acc(prec);
  for (std::size_t i = 0; i < rule->x.size(); ++i) {
    Real x = a + half * (1 + rule->x[i]);
    acc += rule->w[i] * u(x);
  }
  if (side == 0) return acc * half;
  return acc * pow(half, p + 1);
}

constexpr int kLadder[] = {16, 24, 36, 54, 81, 122};

Real adaptive_panel(const RealFn& u, const Real& a, const Real& b, int side, const Real& p,
                    const Real& tol_abs, mpfr_prec_t prec, int depth) {
  Real prev = panel_integral(u, a, b, side, p, kLadder[0], prec);
  for (std::size_t j = 1; j < sizeof(kLadder) / sizeof(int); ++j) {
    Real cur = panel_integral(u, a, b, side, p, kLadder[j], prec);
    if (abs(cur - prev) <= tol_abs) return cur;
    prev = cur;
  }
  if (depth <= 0) {
    throw std::runtime_error("adaptive panel integration failed to converge");
  }
  Real mid = (a + b) / 2;
  Real half_tol = tol_abs / 2;
  Real zero(0.0, prec);
  if (side < 0) {
    return adaptive_panel(u, a, mid, -1, p, half_tol, prec, depth - 1) +
           adaptive_panel(u, mid, b, 0, zero, half_tol, prec, depth - 1);
  }
  if (side > 0) {
    return adaptive_panel(u, a, mid, 0, zero, half_tol, prec, depth - 1) +
           adaptive_panel(u, mid, b, 1, p, half_tol, prec, depth - 1);
  }
  return adaptive_panel(u, a, mid, 0, p, half_tol, prec, depth - 1) +
         adaptive_panel(u, mid, b, 0, p, half_tol, prec, depth - 1);
}

}  // namespace

PanelPlan make_panel_plan(const WeightSpec& spec, const Precision& prec, int max_power,
                          const std::vector<Real>& extra_breakpoints, double weight_power) {
  spec.validate();
  mpfr_prec_t bits = prec.bits();

  // Tail cutoff: e^{-2NR^2} R^{max_power} below 2^-(bits+16).
  double dn = static_cast<double>(spec.n);
  double r = std::sqrt(static_cast<double>(prec.mantissa_bits) * 0.6931471805599453 /
                       (2.0 * dn)) +
             2.0;
  double budget = -(static_cast<double>(prec.mantissa_bits) + 16.0) * 0.6931471805599453;
  while (max_power * std::log(r) - 2.0 * dn * r * r * weight_power > budget) r += 0.5;
  if (r < 1.0 + 2.0 * spec.epsilon + 0.5) r = 1.0 + 2.0 * spec.epsilon + 0.5;

  std::vector<Real> bp;
  auto push = [&](double v) { bp.emplace_back(v, bits); };
  push(-r);
  push(-1.0);
  if (spec.tail) {
    push(-1.0 - spec.epsilon);
    push(-1.0 - 2.0 * spec.epsilon);
    push(1.0 + spec.epsilon);
    push(1.0 + 2.0 * spec.epsilon);
  }
  push(1.0);
  push(r);
  for (const auto& s : spec.sing) push(s.lambda);
  // Midpoints between adjacent singularities keep each panel singular at one
  // end only.
  for (std::size_t i = 0; i + 1 < spec.sing.size(); ++i) {
    push((spec.sing[i].lambda + spec.sing[i + 1].lambda) / 2.0);
  }
  for (const auto& x : extra_breakpoints) bp.push_back(x);

  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto sing_at = [&](const Real& x) -> int {
    for (int k = 0; k < static_cast<int>(spec.sing.size()); ++k) {
      if (x == Real(spec.sing[k].lambda, bits)) return k;
    }
    return -1;
  };

  PanelPlan plan;
  plan.tail_cutoff = Real(r, bits);
  Real max_len(0.5, bits);
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const Real& a = bp[i];
    const Real& b = bp[i + 1];
    int ka = sing_at(a);
    int kb = sing_at(b);
    long pieces = std::max(1L, static_cast<long>(std::ceil((b - a).to_double() / 0.5)));
    if (ka >= 0 && kb >= 0 && pieces < 2) pieces = 2;  // should not occur; guard
    for (long j = 0; j < pieces; ++j) {
      Panel panel;
      panel.a = a + (b - a) * j / pieces;
      panel.b = a + (b - a) * (j + 1) / pieces;
      panel.expo = Real(0.0, bits);
      if (j == 0 && ka >= 0) {
        panel.sing_index = ka;
        panel.sing_side = -1;
        panel.expo = Real(2.0 * spec.sing[ka].alpha * weight_power, bits);
      } else if (j == pieces - 1 && kb >= 0) {
        panel.sing_index = kb;
        panel.sing_side = 1;
        panel.expo = Real(2.0 * spec.sing[kb].alpha * weight_power, bits);
      }
      plan.panels.push_back(std::move(panel));
    }
  }
  (void)max_len;
  return plan;
}

Real integrate_weighted(const RealFn& f, const WeightSpec& spec, const Precision& prec) {
  mpfr_prec_t bits = prec.bits();
  PanelPlan plan = make_panel_plan(spec, prec, 0, {}, 1.0);
  Real one(1.0, bits);

  // Rough pass to set the absolute tolerance scale.
  Real scale(0.0, bits);
  std::vector<Real> rough;
  rough.reserve(plan.panels.size());
  for (const auto& panel : plan.panels) {
    int k = panel.sing_index;
    auto u = [&](const Real& x) { return f(x) * spec.weight_power_reduced(x, one, k); };
    Real est = panel_integral(u, panel.a, panel.b, panel.sing_side, panel.expo, 24, bits);
    scale += abs(est);
    rough.push_back(est);
  }
  if (scale.is_zero()) scale = Real(1.0, bits);
  Real tol_abs = scale * prec.rel_tol() * pow2(-6, bits) / static_cast<long>(plan.panels.size());

  Real total(0.0, bits);
  for (const auto& panel : plan.panels) {
    int k = panel.sing_index;
    auto u = [&](const Real& x) { return f(x) * spec.weight_power_reduced(x, one, k); };
    total += adaptive_panel(u, panel.a, panel.b, panel.sing_side, panel.expo, tol_abs, bits, 48);
  }
  return total;
}

Real pv_local_primitive(const Real& z, const Real& lambda, const Real& delta, const Real& p) {
  Real d = abs(z - lambda);
  if (p.is_zero()) return log(d / delta);
  return (pow(d, p) - pow(delta, p)) / p;
}

Real pv_hilbert(const RealFn& f, const WeightSpec& spec, const Real& t, const Precision& prec) {
  mpfr_prec_t bits = prec.bits();
  spec.validate();
  int kt = -1;
  for (int k = 0; k < static_cast<int>(spec.sing.size()); ++k) {
    if (t == Real(spec.sing[k].lambda, bits)) kt = k;
  }
  if (kt >= 0 && spec.sing[kt].alpha <= -0.5) {
    throw std::domain_error("pv_hilbert: pole coincides with a singularity of alpha <= -1/2");
  }
  // Midpoints between t and each singularity keep the two pole panels free of
  // weight singularities at their outer ends.
  std::vector<Real> extra = {t};
  for (const auto& s : spec.sing) {
    Real lam(s.lambda, bits);
    if (lam != t) extra.push_back((t + lam) / 2);
  }
  PanelPlan plan = make_panel_plan(spec, prec, 0, extra, 1.0);
  if (!(t > -plan.tail_cutoff && t < plan.tail_cutoff)) {
    throw std::domain_error("pv_hilbert: t outside the integration domain");
  }
  Real one(1.0, bits);
  // Local exponent at t: 2*alpha_kt, or 0 when t is a regular point.
  Real p_loc = kt >= 0 ? Real(2.0 * spec.sing[kt].alpha, bits) : Real(0.0, bits);
  Real h_t = f(t) * spec.weight_power_reduced(t, one, kt);

  Real scale = abs(h_t) + 1;
  Real tol_abs = scale * prec.rel_tol() * pow2(-6, bits) / static_cast<long>(plan.panels.size());

  Real total(0.0, bits);
  Real delta_left(0.0, bits), delta_right(0.0, bits);
  for (const auto& panel : plan.panels) {
    bool left_of_pole = (panel.b == t);
    bool right_of_pole = (panel.a == t);
    if (left_of_pole || right_of_pole) {
      // Difference-quotient part: (h(x)-h(t))/(x-t), with the |x-t|^{p_loc}
      // factor carried by the rule; the analytic local term integrates to
      // pv_local_primitive across the asymmetric pair.
      Real cross = Real(2.0, bits) * pow2(-static_cast<long>(bits) / 3, bits);
      auto u = [&](const Real& x) {
        Real hx = f(x) * spec.weight_power_reduced(x, one, kt);
        Real dq = (hx - h_t) / (x - t);
        return dq;
      };
      (void)cross;
      int side = left_of_pole ? 1 : -1;
      total += adaptive_panel(u, panel.a, panel.b, side, p_loc, tol_abs, bits, 48);
      if (left_of_pole) delta_left = t - panel.a;
      if (right_of_pole) delta_right = panel.b - t;
    } else {
      int k = panel.sing_index;
      auto u = [&](const Real& x) {
        return f(x) * spec.weight_power_reduced(x, one, k) / (x - t);
      };
      total += adaptive_panel(u, panel.a, panel.b, panel.sing_side, panel.expo, tol_abs, bits, 48);
    }
  }
  // h_t * p.v. int over [t - dL, t + dR] of |x-t|^p/(x-t).
  if (p_loc.is_zero()) {
    total += h_t * log(delta_right / delta_left);
  } else {
    total += h_t * (pow(delta_right, p_loc) - pow(delta_left, p_loc)) / p_loc;
  }
  return total;
}

Real sign_transform(const RealFn& f, const PanelPlan& plan, const Real& x,
                    const Precision& prec) {
  mpfr_prec_t bits = prec.bits();
  Real scale(1.0, bits);
  Real tol_abs = scale * prec.rel_tol() * pow2(-4, bits) /
                 static_cast<long>(std::max<std::size_t>(plan.panels.size(), 1));
  Real before(0.0, bits);  // int_{-R}^{x}
  Real total(0.0, bits);
  for (const auto& panel : plan.panels) {
    Real full = adaptive_panel(f, panel.a, panel.b, panel.sing_side, panel.expo, tol_abs, bits, 48);
    total += full;
    if (x >= panel.b) {
      before += full;
    } else if (x > panel.a) {
      // Partial panel [a, x].
      if (panel.sing_side < 0) {
        before += adaptive_panel(f, panel.a, x, -1, panel.expo, tol_abs, bits, 48);
      } else {
        // Any right-end singular factor stays inside f on [a,x); adaptive
        // bisection resolves the approach to it.
        before += adaptive_panel(f, panel.a, x, 0, Real(0.0, bits), tol_abs, bits, 48);
      }
    }
  }
  return before - total / 2;
}

namespace {

// Tensor/Duffy machinery for the Appendix-B double principal value.
struct Axis1D {
  std::vector<Real> x;
  std::vector<Real> absx;  // |x| without cancellation near 0
  std::vector<Real> w;     // include the |x|^expo factor and affine scale
};

// Nodes/weights for int over [a,b] of |x|^expo * (smooth), where at most one
// endpoint is 0. Interior panels get Gauss-Legendre with |x|^expo folded into
// the weights.
Axis1D axis_rule(const Real& a, const Real& b, const Real& expo, int n, mpfr_prec_t prec) {
  Axis1D out;
  Real half = (b - a) / 2;
  Real zero(0.0, prec);
  bool zero_left = a.is_zero();
  bool zero_right = b.is_zero();
  const GaussRule* rule;
  if (zero_left) {
    rule = &gauss_jacobi(n, zero, expo, prec);
  } else if (zero_right) {
    rule = &gauss_jacobi(n, expo, zero, prec);
  } else {
    rule = &gauss_legendre(n, prec);
  }
  Real jac = (zero_left || zero_right) ? pow(half, expo + 1) : half;
  for (std::size_t i = 0; i < rule->x.size(); ++i) {
    Real x = a + half * (1 + rule->x[i]);
    Real ax;
    if (zero_left) {
      ax = half * (1 + rule->x[i]);
    } else if (zero_right) {
      ax = half * (1 - rule->x[i]);
    } else {
      ax = abs(x);
    }
    Real w = rule->w[i] * jac;
    if (!zero_left && !zero_right) w *= pow(ax, expo);
    out.x.push_back(std::move(x));
    out.absx.push_back(std::move(ax));
    out.w.push_back(std::move(w));
  }
  return out;
}

// int int_{P^2} |x|^a |y|^b r(x,y) Sign(x-y) dx dy via Duffy maps anchored at
// the panel end nearest 0 (the only possible singular corner).
Real duffy_diagonal(const RealFn2& r, const Real& pa, const Real& pb, double a, double b, int n,
                    mpfr_prec_t prec) {
  bool corner_left = abs(pa) <= abs(pb);
  Real c = corner_left ? pa : pb;
  Real other = corner_left ? pb : pa;
  Real len = abs(other - c);
  Real s(corner_left ? 1.0 : -1.0, prec);
  bool corner_zero = c.is_zero();
  Real ra(a, prec), rb(b, prec), zero(0.0, prec);

  // x = c + s xi, y = c + s xi eta, xi in (0,L), eta in (0,1); the mirrored
  // triangle swaps the roles. Sign(x-y) = s on the first triangle.
  const GaussRule& xi_rule =
      corner_zero ? gauss_jacobi(n, zero, ra + rb + 1, prec) : gauss_legendre(n, prec);
  const GaussRule& eta_b = corner_zero ? gauss_jacobi(n, zero, rb, prec) : gauss_legendre(n, prec);
  const GaussRule& eta_a = corner_zero ? gauss_jacobi(n, zero, ra, prec) : gauss_legendre(n, prec);

  Real hxi = len / 2;
  Real jac_xi = corner_zero ? pow(hxi, ra + rb + 2) : hxi;
  Real jac_eta_b = corner_zero ? pow(Real(0.5, prec), rb + 1) : Real(0.5, prec);
  Real jac_eta_a = corner_zero ? pow(Real(0.5, prec), ra + 1) : Real(0.5, prec);

  Real acc(0.0, prec);
  for (std::size_t i = 0; i < xi_rule.x.size(); ++i) {
    Real local = hxi * (1 + xi_rule.x[i]);  // xi, also |x-c|
    Real x = c + s * local;
    Real t1(0.0, prec), t2(0.0, prec);
    for (std::size_t j = 0; j < eta_b.x.size(); ++j) {
      Real eta = (1 + eta_b.x[j]) / 2;
      Real y = c + s * local * eta;
      Real g = r(x, y);
      if (!corner_zero) g *= pow(abs(x), ra) * pow(abs(y), rb);
      t1 += eta_b.w[j] * g;
    }
    for (std::size_t j = 0; j < eta_a.x.size(); ++j) {
      Real eta = (1 + eta_a.x[j]) / 2;
      Real y = c + s * local * eta;
      Real g = r(y, x);
      if (!corner_zero) g *= pow(abs(y), ra) * pow(abs(x), rb);
      t2 += eta_a.w[j] * g;
    }
    Real row = jac_eta_b * t1 - jac_eta_a * t2;
    if (!corner_zero) row *= local;  // jacobian xi when not folded into rules
    acc += xi_rule.w[i] * row;
  }
  return s * jac_xi * acc;
}

// int over [p0,p1] of |x|^expo * g(x, |x|) with tanh-sinh nodes; used for the
// 1-D reductions whose integrands mix |x|^expo with logarithms.
Real ts_axis_integral(const std::function<Real(const Real&, const Real&)>& g, const Real& p0,
                      const Real& p1, const Real& expo, mpfr_prec_t prec) {
  const TanhSinhRule& rule = tanh_sinh(prec);
  bool zero_left = p0.is_zero();
  bool zero_right = p1.is_zero();
  Real half = (p1 - p0) / 2;
  Real acc(0.0, prec);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    Real ax;
    if (zero_left) {
      ax = rule.x[i] < 0.0 ? half * rule.dist[i] : half * (1 + rule.x[i]);
    } else if (zero_right) {
      ax = rule.x[i] > 0.0 ? half * rule.dist[i] : half * (1 - rule.x[i]);
    } else {
      ax = abs(p0 + half * (1 + rule.x[i]));
    }
    // Reconstruct the coordinate from the exact distance on panels touching
    // 0: the deepest nodes otherwise round onto the endpoint itself.
    Real x = zero_left ? ax : (zero_right ? -ax : p0 + half * (1 + rule.x[i]));
    acc += rule.w[i] * pow(ax, expo) * g(x, ax);
  }
  return acc * half;
}

}  // namespace

Real pv_double_sign(const RealFn2& h, double a, double b, const Precision& prec) {
  if (!(a > -1.0) || !(b > -1.0) || !(a + b > -1.0)) {
    throw std::invalid_argument("pv_double_sign: need a, b, a+b > -1");
  }
  mpfr_prec_t bits = prec.bits();
  Real zero(0.0, bits);
  Real ra(a, bits), rb(b, bits);

  // h = h(0,0) + u(x) + v(y) + xy r(x,y). The h(0,0) term vanishes by the
  // (x,y) -> (-x,-y) antisymmetry of the symmetric-epsilon window.
  Real h00 = h(zero, zero);
  auto r = [&](const Real& x, const Real& y) {
    return (h(x, y) - h(x, zero) - h(zero, y) + h00) / (x * y);
  };

  // V_e(x) = p.v. int_{-1}^{1} |y|^e Sign(x-y)/y dy
  //        = 2 sgn(x)(|x|^e - 1)/e   (= 2 sgn(x) log|x| at e=0).
  auto vkernel = [&](const Real& x, const Real& ax, double e) -> Real {
    Real s(x.sign() >= 0 ? 1.0 : -1.0, bits);
    if (e == 0.0) return 2 * s * log(ax);
    return 2 * s * (pow(ax, Real(e, bits)) - 1) / Real(e, bits);
  };

  // T_u = int |x|^a (u(x)/x) V_b(x) dx, with u(x) = h(x,0) - h00 vanishing
  // at 0; T_v mirrors it with the inner integral contributing -V_a.
  auto u_tilde = [&](const Real& x) { return (h(x, zero) - h00) / x; };
  auto v_tilde = [&](const Real& y) { return (h(zero, y) - h00) / y; };

  Real t_u(0.0, bits), t_v(0.0, bits);
  const std::vector<std::pair<double, double>> halves = {{-1.0, 0.0}, {0.0, 1.0}};
  for (auto [p0, p1] : halves) {
    Real a0(p0, bits), a1(p1, bits);
    // guard 0 * log(0) at the deepest tanh-sinh nodes
    t_u += ts_axis_integral(
        [&](const Real& x, const Real& ax) {
          Real ut = u_tilde(x);
          if (ut.is_zero()) return ut;
          return ut * vkernel(x, ax, b);
        },
        a0, a1, ra, bits);
    t_v -= ts_axis_integral(
        [&](const Real& y, const Real& ay) {
          Real vt = v_tilde(y);
          if (vt.is_zero()) return vt;
          return vt * vkernel(y, ay, a);
        },
        a0, a1, rb, bits);
  }

  // 2-D r-term over panel pairs; Sign is constant on off-diagonal pairs.
  const double tau = 0.5;
  const std::vector<std::pair<double, double>> segs = {
      {-1.0, -tau}, {-tau, 0.0}, {0.0, tau}, {tau, 1.0}};
  int n = 48;
  Real t_r(0.0, bits);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = 0; j < segs.size(); ++j) {
      Real pa_x(segs[i].first, bits), pb_x(segs[i].second, bits);
      Real pa_y(segs[j].first, bits), pb_y(segs[j].second, bits);
      if (i == j) {
        t_r += duffy_diagonal(r, pa_x, pb_x, a, b, n, bits);
        continue;
      }
      double sgn = segs[i].first + segs[i].second > segs[j].first + segs[j].second ? 1.0 : -1.0;
      Axis1D ax = axis_rule(pa_x, pb_x, ra, n, bits);
      Axis1D ay = axis_rule(pa_y, pb_y, rb, n, bits);
      Real block(0.0, bits);
      for (std::size_t qi = 0; qi < ax.x.size(); ++qi) {
        Real row(0.0, bits);
        for (std::size_t qj = 0; qj < ay.x.size(); ++qj) {
          row += ay.w[qj] * r(ax.x[qi], ay.x[qj]);
        }
        block += ax.w[qi] * row;
      }
      t_r += Real(sgn, bits) * block;
    }
  }

  return t_u + t_v + t_r;
}

Real WeightTable::integrate(const RealFn& f) const {
  Real acc(0.0, nodes.empty() ? 64 : nodes[0].prec());
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

std::vector<Real> WeightTable::moments(int kmax) const {
  mpfr_prec_t bits = nodes.empty() ? 64 : nodes[0].prec();
  std::vector<Real> out(kmax + 1, Real(0.0, bits));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Real p = weights[i];
    out[0] += p;
    for (int k = 1; k <= kmax; ++k) {
      p *= nodes[i];
      out[k] += p;
    }
  }
  return out;
}

namespace {

void build_table_panel(const WeightSpec& spec, double power, int reserve_degree,
                       const Precision& prec, const Panel& panel, int depth, WeightTable* out) {
  mpfr_prec_t bits = prec.bits();
  Real one_p(power, bits);
  int k = panel.sing_index;
  auto u = [&](const Real& x) { return spec.weight_power_reduced(x, one_p, k); };

  Real tol = prec.rel_tol() * pow2(-8, bits);
  // Converge sum of |x|^reserve_degree * u and u itself under node doubling.
  Real prev0(bits), prevd(bits);
  bool have_prev = false;
  for (int n : {24, 36, 54, 81, 122, 163}) {
    const GaussRule* rule;
    Real zero(0.0, bits);
    if (panel.sing_side == 0) {
      rule = &gauss_legendre(n, bits);
    } else if (panel.sing_side < 0) {
      rule = &gauss_jacobi(n, zero, panel.expo, bits);
    } else {
      rule = &gauss_jacobi(n, panel.expo, zero, bits);
    }
    Real half = (panel.b - panel.a) / 2;
    Real jac = panel.sing_side == 0 ? half : pow(half, panel.expo + 1);
    Real s0(0.0, bits), sd(0.0, bits);
    std::vector<Real> xs, ws;
    xs.reserve(rule->x.size());
    ws.reserve(rule->x.size());
    for (std::size_t i = 0; i < rule->x.size(); ++i) {
      Real x = panel.a + half * (1 + rule->x[i]);
      Real w = rule->w[i] * jac * u(x);
      s0 += w;
      sd += w * pow(abs(x), long(reserve_degree));
      xs.push_back(std::move(x));
      ws.push_back(std::move(w));
    }
    Real scale0 = abs(s0) + pow2(-static_cast<long>(bits), bits);
    Real scaled = abs(sd) + pow2(-static_cast<long>(bits), bits);
    if (have_prev && abs(s0 - prev0) <= tol * scale0 && abs(sd - prevd) <= tol * scaled) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out->nodes.push_back(std::move(xs[i]));
        out->weights.push_back(std::move(ws[i]));
      }
      return;
    }
    prev0 = s0;
    prevd = sd;
    have_prev = true;
  }
  if (depth <= 0) throw std::runtime_error("build_weight_table: panel refinement failed");
  Real mid = (panel.a + panel.b) / 2;
  Panel left = panel, right = panel;
  left.b = mid;
  right.a = mid;
  if (panel.sing_side < 0) {
    right.sing_index = -1;
    right.sing_side = 0;
    right.expo = Real(0.0, bits);
  } else if (panel.sing_side > 0) {
    left.sing_index = -1;
    left.sing_side = 0;
    left.expo = Real(0.0, bits);
  }
  build_table_panel(spec, power, reserve_degree, prec, left, depth - 1, out);
  build_table_panel(spec, power, reserve_degree, prec, right, depth - 1, out);
}

}  // namespace

WeightTable build_weight_table(const WeightSpec& spec, double power, int reserve_degree,
                               const Precision& prec) {
  PanelPlan plan = make_panel_plan(spec, prec, reserve_degree, {}, power);
  WeightTable table;
  for (const auto& panel : plan.panels) {
    build_table_panel(spec, power, reserve_degree, prec, panel, 24, &table);
  }
  return table;
}

SignKernelIntegrator::SignKernelIntegrator(const WeightSpec& spec, const Precision& prec,
                                           int max_degree)
    : spec_(spec), prec_(prec) {
  spec_.validate();
  mpfr_prec_t bits = prec_.bits();
  gl_n_ = std::max(48, max_degree / 2 + static_cast<int>(prec.mantissa_bits) / 4 + 16);
  sub_n_ = static_cast<int>(prec.mantissa_bits) / 4 + 16;
  sub_n_pole_ = static_cast<int>(prec.mantissa_bits) / 3 + 20;

  PanelPlan plan = make_panel_plan(spec_, prec_, 2 * max_degree + 2, {}, 0.5);
  Real half_pow(0.5, bits);
  for (const auto& panel : plan.panels) {
    PanelNodes pn;
    pn.panel = panel;
    pn.first = nodes_.size();
    Real half = (panel.b - panel.a) / 2;
    if (panel.sing_side != 0) {
      // Tanh-sinh on singular panels: the outer integrand is only Hoelder
      // continuous at lambda (the cumulative F carries |x-lambda|^{a} terms).
      const TanhSinhRule& rule = tanh_sinh(bits);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        Real x = panel.a + half * (1 + rule.x[i]);
        // distance to the singular endpoint, cancellation-free
        Real d;
        if (panel.sing_side < 0) {
          d = rule.x[i] < 0.0 ? half * rule.dist[i] : half * (1 + rule.x[i]);
        } else {
          d = rule.x[i] > 0.0 ? half * rule.dist[i] : half * (1 - rule.x[i]);
        }
        Real sw = spec_.weight_power_reduced(x, half_pow, panel.sing_index) *
                  pow(d, panel.expo);
        nodes_.push_back(x);
        weights_.push_back(rule.w[i] * half * sw);
        dist_.push_back(std::move(d));
      }
    } else {
      const GaussRule& rule = gauss_legendre(gl_n_, bits);
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        Real x = panel.a + half * (1 + rule.x[i]);
        nodes_.push_back(x);
        weights_.push_back(rule.w[i] * half * spec_.weight_power(x, half_pow));
        dist_.push_back(Real(0.0, bits));
      }
    }
    pn.count = nodes_.size() - pn.first;
    panels_.push_back(std::move(pn));
  }
}

namespace {

// Plain Gauss-Legendre segment integral of a callable.
Real seg_gl(const RealFn& f, const Real& a, const Real& b, int n, mpfr_prec_t prec) {
  const GaussRule& rule = gauss_legendre(n, prec);
  Real half = (b - a) / 2;
  Real acc(0.0, prec);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    acc += rule.w[i] * f(a + half * (1 + rule.x[i]));
  }
  return acc * half;
}

// Jacobi segment integral: int_a^b u(x) |x-s|^p dx with s = a (side<0) or b.
Real seg_jacobi(const RealFn& u, const Real& a, const Real& b, int side, const Real& p, int n,
                mpfr_prec_t prec) {
  return panel_integral(u, a, b, side, p, n, prec);
}

}  // namespace

SignKernelIntegrator::Cumulative SignKernelIntegrator::cumulative(const InnerFn& f) const {
  mpfr_prec_t bits = prec_.bits();
  Real half_pow(0.5, bits);
  Cumulative out;
  out.at_nodes.assign(nodes_.size(), Real(0.0, bits));

  Real lam(0.0, bits);
  Real near_tol = pow2(-static_cast<long>(bits) / 3, bits);
  if (f.pole_index >= 0) lam = Real(spec_.sing[f.pole_index].lambda, bits);

  auto fval = [&](const Real& y) {
    Real v = f.numerator(y);
    if (f.pole_index >= 0) v /= (y - lam);
    return v;
  };

  Real acc(0.0, bits);
  // Pole-pair state: while inside the two panels surrounding the pole, F is
  // acc + h(lambda) * pv_local_primitive(, lambda, delta0, alpha).
  bool pair_active = false;
  Real pair_h(0.0, bits), pair_dh(0.0, bits), pair_delta0(0.0, bits), pair_alpha(0.0, bits);

  for (const auto& pn : panels_) {
    const Panel& panel = pn.panel;
    bool pole_panel = f.pole_index >= 0 && panel.sing_index == f.pole_index;
    int sub_n = panel.sing_side != 0 ? sub_n_pole_ : sub_n_;

    if (pole_panel && panel.sing_side > 0) {
      // entering the pair through the left panel
      pair_active = true;
      pair_alpha = panel.expo;
      pair_delta0 = panel.b - panel.a;
      Real swr = spec_.weight_power_reduced(lam, half_pow, f.pole_index);
      pair_h = f.numerator(lam) * swr;
      pair_dh = f.numerator_deriv(lam) * swr +
                f.numerator(lam) * swr * spec_.log_sqrtw_reduced_deriv(lam, f.pole_index);
    }

    // Integrand for sub-segments. Within a pole panel only the
    // difference-quotient (regular) part is integrated numerically.
    auto dq = [&](const Real& y) {
      Real d = y - lam;
      if (abs(d) < near_tol) return pair_dh;
      Real h = f.numerator(y) * spec_.weight_power_reduced(y, half_pow, f.pole_index);
      return (h - pair_h) / d;
    };
    auto reg_direct = [&](const Real& y) {
      if (pole_panel) return dq(y) * pow(abs(y - lam), pair_alpha);
      return fval(y) * spec_.weight_power(y, half_pow);
    };
    auto reg_reduced = [&](const Real& y) {
      if (pole_panel) return dq(y);
      return fval(y) * spec_.weight_power_reduced(y, half_pow, panel.sing_index);
    };

    Real prev = panel.a;
    for (std::size_t i = 0; i < pn.count; ++i) {
      const Real& x = nodes_[pn.first + i];
      Real seg(0.0, bits);
      if (i == 0 && panel.sing_side < 0) {
        seg = seg_jacobi(reg_reduced, prev, x, -1, panel.expo, sub_n, bits);
      } else {
        seg = seg_gl(reg_direct, prev, x, sub_n, bits);
      }
      acc += seg;
      Real F = acc;
      if (pair_active) {
        // use the exactly-carried node distance, not |x - lam| from the
        // rounded node
        const Real& d = dist_[pn.first + i];
        if (pair_alpha.is_zero()) {
          F += pair_h * log(d / pair_delta0);
        } else {
          F += pair_h * (pow(d, pair_alpha) - pow(pair_delta0, pair_alpha)) / pair_alpha;
        }
      }
      out.at_nodes[pn.first + i] = F;
      prev = x;
    }
    // close the panel
    if (panel.sing_side > 0) {
      acc += seg_jacobi(reg_reduced, prev, panel.b, 1, panel.expo, sub_n, bits);
    } else {
      acc += seg_gl(reg_direct, prev, panel.b, sub_n, bits);
    }
    if (pole_panel && panel.sing_side < 0) {
      // leaving the pair through the right panel: fold the local term back in
      acc += pair_h * pv_local_primitive(panel.b, lam, pair_delta0, pair_alpha);
      pair_active = false;
    }
  }
  out.total = acc;
  return out;
}

std::vector<SignKernelIntegrator::Cumulative> SignKernelIntegrator::cumulative_monomials(
    int kmax) const {
  mpfr_prec_t bits = prec_.bits();
  Real half_pow(0.5, bits);
  std::vector<Cumulative> out(kmax + 1);
  for (auto& c : out) {
    c.at_nodes.assign(nodes_.size(), Real(0.0, bits));
    c.total = Real(0.0, bits);
  }
  std::vector<Real> acc(kmax + 1, Real(0.0, bits));
  std::vector<Real> seg(kmax + 1, Real(0.0, bits));

  // Shared-evaluation segment integral: adds int_a^b y^k sqrt(w) dy for all k.
  auto add_segment = [&](const Real& a, const Real& b, int side, int sing_index,
                         const Real& expo, int n) {
    for (auto& s : seg) s = Real(0.0, bits);
    Real half = (b - a) / 2;
    Real zero(0.0, bits);
    const GaussRule* rule;
    Real jac;
    if (side == 0) {
      rule = &gauss_legendre(n, bits);
      jac = half;
    } else if (side < 0) {
      rule = &gauss_jacobi(n, zero, expo, bits);
      jac = pow(half, expo + 1);
    } else {
      rule = &gauss_jacobi(n, expo, zero, bits);
      jac = pow(half, expo + 1);
    }
    for (std::size_t q = 0; q < rule->x.size(); ++q) {
      Real y = a + half * (1 + rule->x[q]);
      Real sw = side == 0 ? spec_.weight_power(y, half_pow)
                          : spec_.weight_power_reduced(y, half_pow, sing_index);
      Real p = rule->w[q] * sw;
      seg[0] += p;
      for (int k = 1; k <= kmax; ++k) {
        p *= y;
        seg[k] += p;
      }
    }
    for (int k = 0; k <= kmax; ++k) acc[k] += seg[k] * jac;
  };

  for (const auto& pn : panels_) {
    const Panel& panel = pn.panel;
    int sub_n = panel.sing_side != 0 ? sub_n_pole_ : sub_n_;
    Real prev = panel.a;
    for (std::size_t i = 0; i < pn.count; ++i) {
      const Real& x = nodes_[pn.first + i];
      if (i == 0 && panel.sing_side < 0) {
        add_segment(prev, x, -1, panel.sing_index, panel.expo, sub_n);
      } else {
        add_segment(prev, x, 0, -1, panel.expo, sub_n);
      }
      for (int k = 0; k <= kmax; ++k) out[k].at_nodes[pn.first + i] = acc[k];
      prev = x;
    }
    if (panel.sing_side > 0) {
      add_segment(prev, panel.b, 1, panel.sing_index, panel.expo, sub_n);
    } else {
      add_segment(prev, panel.b, 0, -1, panel.expo, sub_n);
    }
  }
  for (int k = 0; k <= kmax; ++k) out[k].total = acc[k];
  return out;
}

Real SignKernelIntegrator::pair(const RealFn& g, const Cumulative& F) const {
  mpfr_prec_t bits = prec_.bits();
  Real acc(0.0, bits);
  Real half_total = F.total / 2;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    acc += weights_[i] * g(nodes_[i]) * (F.at_nodes[i] - half_total);
  }
  return acc;
}

}  // namespace rmtlab
